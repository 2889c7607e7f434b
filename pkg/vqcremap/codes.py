"""Error codes carried by exceptions and results, and the process exit codes used by
the command line.
"""

ERROR_CONFIGURATION = 1
ERROR_QUBIT_INDEX = 2
ERROR_NUMERIC = 3
ERROR_DEGENERATE_INPUT = 4
ERROR_INGESTION = 5
ERROR_INTERNAL = 99

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

import numpy as np

# Independent random streams derived from one seed: splitting a dataset, initialising
# a model and shuffling batches never share draws.
SPLIT_STREAM = 0
INIT_STREAM = 1
SHUFFLE_STREAM = 2


def stream(seed: int, stream_id: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream_id])

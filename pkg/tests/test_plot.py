import pytest

from vqcremap.exceptions import ConfigurationError
from vqcremap.plot import (
    SVG,
    Axes,
    average_over_datasets,
    comparison_svg,
    curve_statistics,
    learning_curves_svg,
    plot,
    remap_functions_svg,
)
from vqcremap.remap import REMAP_NAMES
from vqcremap.runner import epoch_lines, record_path, run_document, runs_dir, write_json
from vqcremap.training import TrainRecord


def make_record(
    approach="none", seed=0, dataset="iris", embedding="angle", model="vqc"
):
    return TrainRecord(
        dataset=dataset,
        approach=approach,
        seed=seed,
        embedding=embedding,
        reupload=False,
        model=model,
        train_loss=[1.0, 0.6 + 0.01 * seed, 0.5],
        train_acc=[0.4, 0.6, 0.7],
        valid_loss=[1.1, 0.7, 0.6 - 0.01 * seed],
        valid_acc=[0.3, 0.5, 0.6],
        test_acc=0.5,
        test_correct=[1, 0],
        max_abs_weight=1.0,
    )


# SVG


def test_SVG():
    svg = SVG()
    svg.header(10, 10)
    svg.group_start({"class": "a", "title": "x < y", "onclick": "evil()"})
    svg.group_end()
    markup = svg.get_svg()
    assert markup.endswith("</svg>\n")
    assert "<title>x &lt; y</title>" in markup
    assert "onclick" not in markup


def test_Axes_flat_range():
    axes = Axes(0, 0, (1, 3), (0.5, 0.5))
    assert axes.y_range == (0.0, 1.0)


def test_curve_statistics():
    mean, std = curve_statistics([[1.0, 2.0], [3.0, 2.0]])
    assert mean.tolist() == [2.0, 2.0]
    assert std.tolist() == [1.0, 0.0]


# learning_curves_svg


def test_learning_curves_svg():
    records = [make_record(a, s) for a in ("none", "tanh") for s in range(3)]
    markup = learning_curves_svg(records, "iris (angle)", ["none", "tanh"])
    # Two approaches, two panels, train and validation curves.
    assert markup.count("<polyline") == 8
    assert markup.count('class="band"') == 8
    assert markup.count('stroke-dasharray="5,3"') == 4


def test_learning_curves_svg_single_run_has_no_band():
    markup = learning_curves_svg([make_record()], "iris (angle)", ["none"])
    assert markup.count("<polyline") == 4
    assert 'class="band"' not in markup


def test_learning_curves_svg_skips_missing_approach():
    markup = learning_curves_svg([make_record()], "iris", ["none", "sin"])
    assert markup.count('class="approach"') == 2


def test_learning_curves_svg_key():
    records = [make_record(model="mlp"), make_record()]
    markup = learning_curves_svg(records, "t", ["mlp"], key=lambda r: r.model)
    assert markup.count('class="approach"') == 2
    assert markup.count("<polyline") == 4


# average_over_datasets


def test_average_over_datasets():
    iris = [make_record(seed=s) for s in range(2)]
    wine = [
        make_record(seed=s, dataset="wine")._replace(valid_loss=[0.9, 0.5, 0.2])
        for s in range(2)
    ]
    averaged = average_over_datasets(iris + wine)
    assert [(r.dataset, r.approach, r.seed) for r in averaged] == [
        ("all", "none", 0),
        ("all", "none", 1),
    ]
    assert averaged[0].valid_loss == pytest.approx([1.0, 0.6, 0.4])
    assert averaged[1].valid_loss == pytest.approx([1.0, 0.6, 0.395])
    assert averaged[0].test_correct == [1, 0, 1, 0]


def test_average_over_datasets_shortest_run():
    short = make_record(dataset="wine")._replace(
        train_loss=[1.0, 0.5],
        train_acc=[0.5, 0.5],
        valid_loss=[1.0, 0.5],
        valid_acc=[0.5, 0.5],
    )
    averaged = average_over_datasets([make_record(), short])
    assert len(averaged[0].valid_acc) == 2


# comparison_svg


def test_comparison_svg():
    records = [
        make_record(dataset="iris-2class", embedding="amplitude", model=model, seed=s)
        for model in ("vqc", "mlp")
        for s in range(2)
    ]
    markup = comparison_svg(records)
    assert markup.count('class="approach"') == 4
    assert "<title>mlp loss</title>" in markup
    assert "<title>vqc-none accuracy</title>" in markup


# remap_functions_svg


def test_remap_functions_svg():
    assert remap_functions_svg().count("<polyline") == len(REMAP_NAMES)


# plot


def write_run(out, record):
    identifier = "__".join(
        (record.dataset, record.embedding, record.approach, "plain", record.model)
    )
    (runs_dir(out) / f"{identifier}.jsonl").write_text(epoch_lines(record))
    write_json(record_path(out, identifier), run_document(record, {}))


def test_plot(tmp_path):
    out = str(tmp_path)
    runs_dir(out).mkdir(parents=True)
    for approach in ("none", "elu"):
        write_run(out, make_record(approach))
    written = plot(out)
    names = sorted(path.name for path in written)
    assert names == ["iris-angle.svg", "remap-functions.svg"]
    assert all(path.parent == tmp_path / "plots" for path in written)


def test_plot_all_datasets_and_compare(tmp_path):
    out = str(tmp_path)
    runs_dir(out).mkdir(parents=True)
    for dataset in ("iris", "wine"):
        for approach in ("none", "tanh"):
            write_run(out, make_record(approach, dataset=dataset))
    for model in ("vqc", "mlp"):
        record = make_record(dataset="iris-2class", embedding="amplitude", model=model)
        write_run(out, record)
    written = plot(out)
    assert sorted(path.name for path in written) == [
        "all-angle.svg",
        "compare.svg",
        "iris-2class-amplitude.svg",
        "iris-angle.svg",
        "remap-functions.svg",
        "wine-angle.svg",
    ]
    assert (tmp_path / "plots" / "all-angle.svg").read_text().count(
        'class="approach"'
    ) == 4


def test_plot_no_runs(tmp_path):
    with pytest.raises(ConfigurationError):
        plot(str(tmp_path))

import json

import numpy as np
import pytest

from tsarm.errors import DataFormatError, NonFiniteError, ShapeError
from tsarm.series import LabeledDataset, read_csv, sidecar_path, write_csv
from tsarm.synthgen import SynthConfig, gen_dataset


def test_round_trip(tmp_path):
    ds = gen_dataset("B2", SynthConfig(samples_per_class=4))
    write_csv(ds, tmp_path / "d.csv")
    back = read_csv(tmp_path / "d.csv")
    assert np.array_equal(back.X, ds.X) and np.array_equal(back.y, ds.y)
    assert back.metadata["dataset_id"] == "B2"
    assert json.loads(sidecar_path(tmp_path / "d.csv").read_text())["seed"] == ds.metadata["seed"]


def test_header(tmp_path):
    ds = LabeledDataset([[1.0, 2.0, 3.0]], [0])
    write_csv(ds, tmp_path / "d.csv", sidecar=False)
    assert (tmp_path / "d.csv").read_text().splitlines()[0] == "label,v0,v1,v2"


@pytest.mark.parametrize("text,row,col", [
    ("label,v0,v1\n0,1,2\n1,1,x\n", 3, 3),
    ("label,v0,v1\n0,1,2\nq,1,2\n", 3, 1),
    ("label,v0,v1\n0,1\n", 2, 3),
    ("label,v0,v2\n0,1,2\n", 1, 3),
    ("lbl,v0\n0,1\n", 1, 1),
    ("label,v0\n0,nan\n", 2, 2),
])
def test_malformed(tmp_path, text, row, col):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(DataFormatError) as exc:
        read_csv(p)
    assert (exc.value.row, exc.value.column) == (row, col)
    assert f"row {row}" in str(exc.value)


def test_multichannel_rejected(tmp_path):
    p = tmp_path / "mc.csv"
    p.write_text("label,ch0_v0,ch0_v1,ch1_v0,ch1_v1\n0,1,2,3,4\n")
    with pytest.raises(DataFormatError, match="single channel"):
        read_csv(p)


def test_empty_and_missing(tmp_path):
    (tmp_path / "e.csv").write_text("")
    with pytest.raises(DataFormatError):
        read_csv(tmp_path / "e.csv")
    with pytest.raises(DataFormatError):
        read_csv(tmp_path / "nope.csv")


def test_ragged_samples():
    with pytest.raises(ShapeError):
        LabeledDataset.from_samples([[1, 2, 3], [1, 2]])


def test_nonfinite():
    with pytest.raises(NonFiniteError):
        LabeledDataset([[1.0, np.inf]], [0])

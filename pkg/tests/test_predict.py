"""Hard decision rules, joint class scores, and thickness binning."""

import numpy as np
import pytest

from cloudmtl import engine as E
from cloudmtl.errors import DataError
from cloudmtl.models import (
    ArchitectureSpec, assign_thickness_bin, predictions_from_outputs,
    thickness_onehot,
)
from cloudmtl.models.network import ModelOutputs

BINS = (-1.5, 0.0, 1.0, 2.5)


def outputs(u_cloud, u_liquid, y=None):
    u_cloud = np.asarray(u_cloud, dtype=np.float64)
    u_liquid = np.asarray(u_liquid, dtype=np.float64)
    y = np.zeros_like(u_cloud) if y is None else np.asarray(y, float)
    c = E.constant
    return ModelOutputs(u_cloud=c(u_cloud), u_clear=c(1.0 - u_cloud),
                        u_liquid=c(u_liquid), u_ice=c(1.0 - u_liquid),
                        y_cot_hat=c(y))


HSPEC = ArchitectureSpec(variant="MT-HCR", input_dim=4,
                         encoder_widths=(2,), head_hidden=(2,))
FSPEC = ArchitectureSpec(variant="MT-CR", input_dim=4,
                         encoder_widths=(2,), head_hidden=(2,))


def test_threshold_tie_counts_as_cloudy():
    pred = predictions_from_outputs(outputs([0.5, 0.49999, 0.7],
                                            [0.9, 0.9, 0.9]), HSPEC)
    assert pred.cloudy.tolist() == [True, False, True]
    assert pred.label.tolist() == [1, 0, 1]


def test_phase_tie_counts_as_liquid():
    pred = predictions_from_outputs(outputs([1, 1, 1], [0.5, 0.51, 0.49]),
                                    HSPEC)
    assert pred.label.tolist() == [1, 1, 2]


def test_cot_masked_to_predicted_cloudy():
    pred = predictions_from_outputs(
        outputs([0.9, 0.1], [0.8, 0.8], y=[1.25, 0.5]), HSPEC)
    assert pred.cot_log10[0] == 1.25
    assert np.isnan(pred.cot_log10[1])
    np.testing.assert_array_equal(pred.cot_raw, [1.25, 0.5])


def test_custom_threshold_respected():
    spec = ArchitectureSpec(variant="MT-HCR", input_dim=4,
                            encoder_widths=(2,), head_hidden=(2,),
                            threshold=0.9)
    pred = predictions_from_outputs(outputs([0.85, 0.9], [1, 1]), spec)
    assert pred.cloudy.tolist() == [False, True]


def test_joint_scores_for_hierarchical_and_seq():
    """Hierarchical and sequential phase scores multiply in the mask score;
    flat variants report the raw head outputs."""
    out = outputs([0.8], [0.6])
    for variant in ("MT-HCR", "SEQ"):
        spec = ArchitectureSpec(variant=variant, input_dim=4,
                                encoder_widths=(2,), head_hidden=(2,))
        pred = predictions_from_outputs(out, spec)
        assert pred.score_liquid[0] == pytest.approx(0.8 * 0.6, rel=1e-15)
        assert pred.score_ice[0] == pytest.approx(0.8 * 0.4, rel=1e-15)
    flat = predictions_from_outputs(out, FSPEC)
    assert flat.score_liquid[0] == pytest.approx(0.6, rel=1e-15)
    assert flat.score_ice[0] == pytest.approx(0.4, rel=1e-15)


def test_bin_assignment_edges():
    vals = [-1.5, -0.1, 0.0, 0.5, 0.999, 1.0, 2.0, 2.5]
    got = assign_thickness_bin(np.array(vals), BINS)
    assert got.tolist() == [0, 0, 1, 1, 1, 2, 2, 2]


def test_bin_out_of_range_rejected():
    with pytest.raises(DataError, match="-1.6"):
        assign_thickness_bin(np.array([-1.6]), BINS)
    with pytest.raises(DataError, match="2.6"):
        assign_thickness_bin(np.array([0.0, 2.6]), BINS)


def test_onehot_zero_rows_for_clear():
    cot = np.array([np.nan, 0.5, np.nan, 1.5])
    cloudy = np.array([False, True, False, True])
    oh = thickness_onehot(cot, cloudy, BINS)
    np.testing.assert_array_equal(
        oh, [[0, 0, 0], [0, 1, 0], [0, 0, 0], [0, 0, 1]])


def test_onehot_all_clear():
    oh = thickness_onehot(np.array([np.nan, np.nan]),
                          np.array([False, False]), BINS)
    np.testing.assert_array_equal(oh, np.zeros((2, 3)))

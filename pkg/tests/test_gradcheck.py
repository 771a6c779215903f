"""Finite-difference harness behavior."""

import numpy as np
import pytest

from cloudmtl import engine as E
from cloudmtl.engine import ParamStore, finite_diff_check
from cloudmtl.errors import DeterminismError


def _quadratic_store():
    ps = ParamStore()
    ps.add("w", np.array([[0.5, -1.0], [2.0, 0.25]]))
    return ps


def test_passes_on_smooth_loss():
    ps = _quadratic_store()

    def loss(params):
        w = params["w"]
        return E.reduce_sum(E.mul(w, w))

    rep = finite_diff_check(loss, ps)
    assert rep.passed
    assert rep.max_rel_err < 1e-6
    assert rep.checked > 0


def test_catches_wrong_gradient():
    """An op with a deliberately broken vjp must be flagged."""
    ps = _quadratic_store()

    def loss(params):
        w = params["w"]
        out = E.reduce_sum(E.mul(w, w))
        # corrupt the cotangent path: pretend d(sum w^2)/dw = w (missing 2x)
        bad = E.Tensor(out.value, parents=(w,),
                       vjp=lambda g: (g * w.value,))
        return bad

    rep = finite_diff_check(loss, ps)
    assert not rep.passed
    assert rep.max_rel_err > 1e-2


def test_nondeterministic_loss_rejected():
    ps = _quadratic_store()
    state = {"calls": 0}

    def loss(params):
        state["calls"] += 1
        w = params["w"]
        return E.add(E.reduce_sum(E.mul(w, w)), float(state["calls"]))

    with pytest.raises(DeterminismError):
        finite_diff_check(loss, ps)


def test_kink_entries_are_skipped_not_failed():
    """relu at 0 makes central differences disagree with the analytic
    gradient; the one-sided disagreement must excuse the entry."""
    ps = ParamStore()
    ps.add("w", np.array([0.0, 1.0, -2.0]))

    def loss(params):
        return E.reduce_sum(E.relu(params["w"]))

    rep = finite_diff_check(loss, ps)
    assert rep.passed
    assert len(rep.skipped) >= 1


def test_report_summary_mentions_worst_parameter():
    ps = _quadratic_store()

    def loss(params):
        w = params["w"]
        return E.reduce_sum(E.mul(w, w))

    rep = finite_diff_check(loss, ps)
    text = rep.summary()
    assert "w" in text
    assert "max rel err" in text


def test_zero_analytic_gradient_with_fd_noise_passes():
    """Cancellation can make the true gradient 0 while central differences
    return pure roundoff; the resolution guard must not fail such entries."""
    ps = ParamStore()
    ps.add("b", np.array([0.0]))

    def loss(params):
        b = params["b"]
        # |1 + b| + |1 - b| has exactly zero derivative at b = 0
        left = E.absval(E.add(1.0, b))
        right = E.absval(E.sub(1.0, b))
        return E.reduce_sum(E.add(left, right))

    rep = finite_diff_check(loss, ps)
    assert rep.passed

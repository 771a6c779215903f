"""Composite training loss and its per-component breakdown.

The total is always the literal four-term sum

    total = l_hc + l_car + l_rec + l_lasso

with ``l_hc = l_cmask + l_cphase`` and ``l_car = l_reg + l_caux``:

* ``l_cmask``  cloud-mask classification. Hierarchical variants use the
  two-output cross entropy ``-mean(l_cloud*log(u_cloud) +
  l_clear*log(u_clear))`` (the labels are complementary); flat variants use
  full binary cross entropy on both mask outputs.
* ``l_cphase`` phase classification. Hierarchical variants weight each
  phase term by the cloud-mask uncertainty and take the log of the joint
  path probability: ``-mean(u_cloud*l_liq*log(u_cloud*u_liq) +
  u_cloud*l_ice*log(u_cloud*u_ice))``. Flat variants use binary cross
  entropy on both phase outputs.
* ``l_reg``    absolute error of the regression output, summed over
  truly-cloudy pixels (``reg_norm="mean"`` divides by their count).
* ``l_caux``   thickness-bin cross entropy, summed over truly-cloudy pixels.
* ``l_rec``    reconstruction MSE over every pixel and input feature.
* ``l_lasso``  lasso_lambda times the L1 norm of all weight (non-bias)
  parameters.

Components that a variant lacks (no decoder, no aux head) contribute an
exact 0.0. Every probability entering a logarithm is clamped to
``[1e-7, 1 - 1e-7]`` first.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .. import engine as E
from ..engine import Tensor, ParamStore
from ..errors import DimensionError
from .config import ArchitectureSpec
from .network import ModelOutputs
from .inference import thickness_onehot


@dataclass
class LossTargets:
    """Supervision for one batch, as plain float64 arrays."""

    x: np.ndarray            # (n, M) standardized features (recon target)
    l_cloud: np.ndarray      # (n,) 1.0 where truly cloudy
    l_clear: np.ndarray
    l_liquid: np.ndarray
    l_ice: np.ndarray
    y_cot: np.ndarray        # (n,) log10 COT, 0.0 filler where clear
    aux_onehot: np.ndarray   # (n, 3) one-hot thickness bin, zero rows if clear
    cloudy: np.ndarray       # (n,) bool

    @classmethod
    def from_dataset(cls, ds, features: np.ndarray,
                     bins: tuple[float, float, float, float]) -> "LossTargets":
        cloudy = ds.cloudy_mask()
        return cls(
            x=np.asarray(features, dtype=np.float64),
            l_cloud=ds.l_cloud(), l_clear=ds.l_clear(),
            l_liquid=ds.l_liquid(), l_ice=ds.l_ice(),
            y_cot=np.nan_to_num(ds.cot_log10, nan=0.0),
            aux_onehot=thickness_onehot(ds.cot_log10, cloudy, bins),
            cloudy=cloudy,
        )

    def take(self, idx: np.ndarray) -> "LossTargets":
        return LossTargets(
            x=self.x[idx], l_cloud=self.l_cloud[idx], l_clear=self.l_clear[idx],
            l_liquid=self.l_liquid[idx], l_ice=self.l_ice[idx],
            y_cot=self.y_cot[idx], aux_onehot=self.aux_onehot[idx],
            cloudy=self.cloudy[idx])

    def __len__(self) -> int:
        return int(self.l_cloud.shape[0])


@dataclass
class LossBreakdown:
    """Float values of every component for one evaluation."""

    l_cmask: float
    l_cphase: float
    l_hc: float
    l_reg: float
    l_caux: float
    l_car: float
    l_rec: float
    l_lasso: float
    total: float

    def to_dict(self) -> dict:
        return asdict(self)


def _clamp_prob(t: Tensor) -> Tensor:
    return E.clamp(t, E.PROB_EPS, 1.0 - E.PROB_EPS)


def _bce_pair(u: Tensor, labels: np.ndarray) -> Tensor:
    """Per-pixel binary cross entropy for one output column (vector form)."""
    ones = np.ones_like(labels)
    pos = E.mul(E.constant(labels), E.log(u))
    neg = E.mul(E.constant(ones - labels), E.log(E.sub(1.0, u)))
    return E.neg(E.add(pos, neg))


def compute_loss(outputs: ModelOutputs, targets: LossTargets,
                 spec: ArchitectureSpec,
                 params: ParamStore | None = None) -> tuple[Tensor, LossBreakdown]:
    """Evaluate the composite loss; returns the scalar graph node + floats.

    ``params`` supplies the lasso domain; pass the model store during
    training, or None to get ``l_lasso = 0`` (useful for output-level tests).
    """
    n = len(targets)
    if outputs.u_cloud.value.shape != (n,):
        raise DimensionError(
            f"outputs cover {outputs.u_cloud.value.shape} pixels, targets {n}")
    zero = E.constant(0.0)
    u_cloud = _clamp_prob(outputs.u_cloud)
    u_clear = _clamp_prob(outputs.u_clear)
    u_liquid = _clamp_prob(outputs.u_liquid)
    u_ice = _clamp_prob(outputs.u_ice)

    if spec.hierarchical:
        term = E.add(E.mul(E.constant(targets.l_cloud), E.log(u_cloud)),
                     E.mul(E.constant(targets.l_clear), E.log(u_clear)))
        l_cmask = E.neg(E.reduce_mean(term))
        # joint path probability inside the log, mask uncertainty outside
        liq = E.mul(E.mul(u_cloud, E.constant(targets.l_liquid)),
                    E.log(E.mul(u_cloud, u_liquid)))
        ice = E.mul(E.mul(u_cloud, E.constant(targets.l_ice)),
                    E.log(E.mul(u_cloud, u_ice)))
        l_cphase = E.neg(E.reduce_mean(E.add(liq, ice)))
    else:
        mask_ce = E.add(_bce_pair(u_cloud, targets.l_cloud),
                        _bce_pair(u_clear, targets.l_clear))
        l_cmask = E.reduce_mean(mask_ce)
        phase_ce = E.add(_bce_pair(u_liquid, targets.l_liquid),
                         _bce_pair(u_ice, targets.l_ice))
        if spec.variant == "SEQ":
            # The sequential pipeline's phase net only ever trains on cloudy
            # pixels, so its composite loss averages over those alone.
            sel = targets.cloudy.astype(np.float64)
            l_cphase = E.div(E.reduce_sum(E.mul(phase_ce, E.constant(sel))),
                             E.constant(max(float(sel.sum()), 1.0)))
        else:
            l_cphase = E.reduce_mean(phase_ce)

    cloudy_f = targets.cloudy.astype(np.float64)
    n_cloudy = float(cloudy_f.sum())
    abs_err = E.absval(E.sub(outputs.y_cot_hat, E.constant(targets.y_cot)))
    l_reg = E.reduce_sum(E.mul(abs_err, E.constant(cloudy_f)))
    if spec.reg_norm == "mean":
        l_reg = E.div(l_reg, E.constant(max(n_cloudy, 1.0)))

    if outputs.aux_probs is not None:
        logp = E.log(_clamp_prob(outputs.aux_probs))
        weighted = E.mul(E.constant(targets.aux_onehot), logp)
        # aux_onehot rows are zero for clear pixels, so the truly-cloudy
        # restriction is already encoded in the targets
        l_caux = E.neg(E.reduce_sum(weighted))
    else:
        l_caux = zero

    if outputs.x_recon is not None:
        if outputs.x_recon.value.shape != targets.x.shape:
            raise DimensionError(
                f"reconstruction shape {outputs.x_recon.value.shape} does not "
                f"match input {targets.x.shape}")
        diff = E.sub(outputs.x_recon, E.constant(targets.x))
        l_rec = E.reduce_mean(E.mul(diff, diff))
    else:
        l_rec = zero

    if params is not None and spec.lasso_lambda > 0:
        acc = None
        for w in params.weight_tensors():
            s = E.reduce_sum(E.absval(w))
            acc = s if acc is None else E.add(acc, s)
        l_lasso = E.mul(spec.lasso_lambda, acc) if acc is not None else zero
    else:
        l_lasso = zero

    l_hc = E.add(l_cmask, l_cphase)
    l_car = E.add(l_reg, l_caux)
    total = E.add(E.add(l_hc, l_car), E.add(l_rec, l_lasso))

    breakdown = LossBreakdown(
        l_cmask=float(l_cmask.value), l_cphase=float(l_cphase.value),
        l_hc=float(l_hc.value), l_reg=float(l_reg.value),
        l_caux=float(l_caux.value), l_car=float(l_car.value),
        l_rec=float(l_rec.value), l_lasso=float(l_lasso.value),
        total=float(total.value))
    return total, breakdown

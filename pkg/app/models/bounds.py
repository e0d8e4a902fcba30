"""
Bound models for the Semiannulus Regularity Toolkit.
Defines the bound constants and the rows of the randomised campaigns.
"""

import math

from pydantic import BaseModel, ConfigDict, Field


class BoundConstants(BaseModel):
    """Constants of the diameter and offset bounds."""
    model_config = ConfigDict(frozen=True)

    C_disk: float = 4.0 * math.exp(math.pi / 2.0)
    C_halfplane: float = math.exp(math.pi)
    separation_loss: float = math.pi


class FuzzRow(BaseModel):
    """One random disk configuration of the diameter-bound campaign."""

    zeta_arg: float
    r1: float
    r2: float
    a_re: float
    a_im: float
    phi: float
    mod: float
    lhs: float
    rhs: float
    margin: float

    @property
    def violated(self) -> bool:
        return self.margin < 0


class RoundSubannulusRow(BaseModel):
    """One Möbius ring of the round-subannulus campaign."""

    pole_re: float
    pole_im: float
    inner: float
    outer: float
    mod: float
    mod_exact: float
    sub_r: float = Field(gt=0.0)
    sub_R: float = Field(gt=0.0)
    log_ratio: float
    slack: float

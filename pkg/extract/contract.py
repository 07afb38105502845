from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from geostore.contract import SurfacePair
from lift.contract import LiftParams


class ExtractConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    # ---- plane-like ----
    alpha_fine: float = Field(10.0, gt=0, description="1/m, fine contour")
    alpha_coarse: float = Field(0.1, gt=0, description="1/m, coarse contour used for centerlines")
    grid_w: float = Field(1.0, gt=0, description="grid cell width across the centerline, m")
    grid_l: float = Field(1.0, gt=0, description="grid cell length along the centerline, m")
    block_length: float = Field(5.0, gt=0, description="centerline split spacing for road surfaces/sides, m")
    min_branch_plane: float = Field(2.0, gt=0)
    min_cell_area: float = Field(1e-6, ge=0, description="m^2; smaller cell fragments are dropped")

    # ---- guardrail ----
    alpha_guardrail_xy: float = Field(1.0, gt=0)
    alpha_guardrail_xz: float = Field(10.0, gt=0)
    guardrail_block: float = Field(1.0, gt=0, description="centerline split spacing for guardrails, m")
    min_branch_guardrail: float = Field(1.0, gt=0)

    # ---- pole-like parts ----
    dh: float = Field(0.1, gt=0, description="pole slab height, m")
    dl: float = Field(0.1, gt=0, description="light chunk length along its centerline, m")
    n_rays: int = Field(30, ge=3)
    alpha_panel: float = Field(10.0, gt=0)
    alpha_light_xz: float = Field(10.0, gt=0)
    alpha_light_yz: float = Field(2.0, gt=0)
    min_branch_light: float = Field(0.2, gt=0)

    # ---- centerlines ----
    densify: float = Field(0.25, gt=0, description="boundary seed spacing for Voronoi centerlines, m")
    smooth_iters: int = Field(0, ge=0, description="Chaikin iterations on centerlines")

    lift: LiftParams = LiftParams()


@dataclass(frozen=True)
class BlockTransform:
    """Rigid move of one centerline block into the straightened frame."""
    theta: float                            # block angle; forward rotates by -theta
    center: tuple[float, float]             # rotation centre (block centroid, XY)
    offset: tuple[float, float, float]      # translation applied after the rotation
    arc_start: float                        # block start along the straightened X axis
    arc_end: float

    def _rotate(self, pts: np.ndarray, angle: float) -> np.ndarray:
        c, s = math.cos(angle), math.sin(angle)
        out = np.array(pts, dtype=np.float64, copy=True).reshape(-1, 3)
        x = out[:, 0] - self.center[0]
        y = out[:, 1] - self.center[1]
        out[:, 0] = c * x - s * y + self.center[0]
        out[:, 1] = s * x + c * y + self.center[1]
        return out

    def forward(self, pts) -> np.ndarray:
        return self._rotate(pts, -self.theta) + np.asarray(self.offset)

    def inverse(self, pts) -> np.ndarray:
        return self._rotate(np.asarray(pts, dtype=np.float64) - np.asarray(self.offset), self.theta)


@dataclass(frozen=True)
class GuardrailExtraction:
    segment: SurfacePair                    # final pair, original frame
    straight: SurfacePair                   # same pair before the inverse transforms
    transforms: tuple[BlockTransform, ...]
    piece_blocks: tuple[int, ...]           # block index of each polygon in segment/straight

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SignSpec(_Spec):
    station: float = Field(ge=0, description="m along the road centerline")
    offset: float = Field(description="m, left of the centerline is positive")
    yaw: float = Field(90.0, description="panel direction vs. road heading, degrees")
    pole_radius: float = Field(0.05, gt=0)
    height: float = Field(2.5, gt=0)
    panel_shape: Literal["rect", "circle"] = "rect"
    panel_width: float = Field(1.2, gt=0, description="rect width or circle diameter")
    panel_height: float = Field(0.8, gt=0)
    panel_thickness: float = Field(0.02, gt=0)


class LightSpec(_Spec):
    station: float = Field(ge=0)
    offset: float
    base_radius: float = Field(0.08, gt=0)
    top_radius: float = Field(0.05, gt=0)
    height: float = Field(8.0, gt=0)
    arm_length: float = Field(1.5, gt=0)
    arm_radius: float = Field(0.06, gt=0)
    arm_yaw: float | None = Field(None, description="degrees vs. road heading; None points at the centerline")


class GuardrailSpec(_Spec):
    start: float = Field(ge=0, description="start station, m")
    end: float = Field(gt=0, description="end station, m")
    offset: float
    section: Literal["T", "#"] = "T"
    post_spacing: float = Field(2.0, gt=0, description="'#' sections only")


class SceneSpec(_Spec):
    length: float = Field(200.0, gt=0)
    curvature: float = Field(0.0, description="1/m, constant; positive turns left")
    carriageways: Literal[1, 2] = 2
    surface_width: float = Field(7.3, gt=0)
    median_width: float = Field(2.0, ge=0)
    verge_width: float = Field(3.0, ge=0)
    verge_grade: float = Field(0.1, description="rise per meter away from the carriageway")
    elevation_amplitude: float = Field(0.0, ge=0)
    elevation_wavelength: float = Field(20.0, gt=0)
    dash_length: float = Field(3.0, ge=0, description="0 disables lane dashes")
    dash_gap: float = Field(5.0, gt=0)
    dash_width: float = Field(0.15, gt=0)
    signs: list[SignSpec] = Field(default_factory=list)
    lights: list[LightSpec] = Field(default_factory=list)
    guardrails: list[GuardrailSpec] = Field(default_factory=list)
    density: float = Field(400.0, gt=0, description="points/m^2 on road surfaces and sides")
    pole_density: float = Field(4000.0, gt=0, description="points/m^2 on pole-like assets and guardrails")
    sigma: float = Field(0.005, ge=0, description="m, isotropic noise")
    pole_sigma: float | None = Field(None, ge=0, description="m, noise on pole-like assets; None = sigma")
    seed: int = 0

    # ==== cross-section layout ====
    @property
    def carriageway_spans(self) -> list[tuple[float, float]]:
        w = self.surface_width
        if self.carriageways == 1:
            return [(-w / 2, w / 2)]
        m = self.median_width / 2
        return [(-m - w, -m), (m, m + w)]

    @property
    def side_spans(self) -> list[tuple[float, float]]:
        spans = self.carriageway_spans
        lo, hi = spans[0][0], spans[-1][1]
        sides = []
        if self.verge_width > 0:
            sides.append((lo - self.verge_width, lo))
        if self.carriageways == 2 and self.median_width > 0:
            sides.append((spans[0][1], spans[1][0]))
        if self.verge_width > 0:
            sides.append((hi, hi + self.verge_width))
        return sides

    @property
    def half_extent(self) -> float:
        return max(abs(t) for span in self.carriageway_spans + self.side_spans for t in span)

    @classmethod
    def preset(cls, seed: int = 0, **overrides) -> "SceneSpec":
        """A 200 m dual carriageway: 2 surfaces, ~50 dashes, 3 sides, 3 signs, 2 lights, 2 guardrails."""
        base = cls(seed=seed)
        left_edge = base.carriageway_spans[-1][1]
        right_edge = base.carriageway_spans[0][0]
        params = dict(
            seed=seed,
            signs=[
                SignSpec(station=30.0, offset=right_edge - 2.0),
                SignSpec(station=100.0, offset=left_edge + 2.0, yaw=-90.0),
                SignSpec(station=170.0, offset=right_edge - 2.0, panel_shape="circle", panel_width=0.9, panel_height=0.9),
            ],
            lights=[
                LightSpec(station=60.0, offset=left_edge + 2.2),
                LightSpec(station=140.0, offset=right_edge - 2.2),
            ],
            guardrails=[
                GuardrailSpec(start=40.0, end=90.0, offset=right_edge - 0.8),
                GuardrailSpec(start=110.0, end=160.0, offset=left_edge + 0.8, section="#"),
            ],
        )
        params.update(overrides)
        return cls(**params)

"""Section properties, equivalent SDOF parameters, deflections and limit-state decay rates.

Units: lengths in mm, E in MPa (N/mm²), line loads in kN/m (= N/mm),
stiffness in N/m, mass in kg, moments in kN·m. Functions accept scalars or
numpy arrays.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .models import BeamModel, BenchmarkError, IPESection

logger = logging.getLogger(__name__)

# Root fillet per unit radius; centroid offset and inertia are about the flange face.
_FILLET_CENTROID = (10.0 - 3.0 * math.pi) / (12.0 - 3.0 * math.pi)
_FILLET_AREA = 1.0 - math.pi / 4.0
_FILLET_LEG_INERTIA = 1.0 - 5.0 * math.pi / 16.0


class StructureError(BenchmarkError, ValueError):
    """Raised for invalid structural inputs or consumed sections."""


class MomentState(str, Enum):
    ELASTIC = "elastic"
    PLASTIC = "plastic"
    FAILED = "failed"


@dataclass(frozen=True)
class SectionProperties:
    """Corroded (or intact) section geometry and properties in mm units."""

    h: object
    b: object
    t_w: object
    t_f: object
    r: float
    area: object
    inertia: object
    w_el: object
    w_pl: object


@dataclass(frozen=True)
class SdofParams:
    k: float
    m: float
    c: float
    f_n: float


@dataclass(frozen=True)
class DeadLoads:
    """Permanent line loads in kN/m."""

    beam: float
    slab: float
    non_structural: float

    @property
    def structural(self) -> float:
        """p_G1: beam self-weight plus slab."""
        return self.beam + self.slab

    @property
    def total(self) -> float:
        return self.structural + self.non_structural


@dataclass(frozen=True)
class MomentCheck:
    acting: float
    elastic_resistance: float
    plastic_resistance: float
    state: MomentState

    @property
    def utilisation(self) -> float:
        return self.acting / self.elastic_resistance


@dataclass(frozen=True)
class LimitStateSummary:
    """Design-table values of the undamaged beam and the decay rates derived from them."""

    dead: DeadLoads
    delta_g: float
    delta_q: float
    delta_lim: float
    m_r_el: float
    m_r_pl: float
    m_a_uls: float
    r_pl: float
    r_lim: float

    @property
    def frequency_drop_pl(self) -> float:
        return frequency_ratio(self.r_pl)

    @property
    def frequency_drop_lim(self) -> float:
        return frequency_ratio(self.r_lim)


def _scalar(value):
    arr = np.asarray(value, dtype=float)
    return arr if arr.ndim else float(arr)


def section_properties(section: IPESection, corrosion_depth=0.0) -> SectionProperties:
    """Properties of the I-section after uniform loss ``corrosion_depth`` on every face.

    Flange, web, width and depth each lose 2d; the root fillet radius keeps its
    catalogue value. Area, strong-axis inertia and elastic/plastic moduli are
    recomputed from plates plus the four fillets.

    Args:
        section: Catalogue section.
        corrosion_depth: Depth d in mm (scalar or array).

    Returns:
        SectionProperties with matching scalar/array shapes.

    Raises:
        StructureError: If d is negative or consumes the web or flanges.
    """
    d = np.asarray(corrosion_depth, dtype=float)
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise StructureError("Corrosion depth must be finite and non-negative")
    if np.any(d >= section.t_w / 2) or np.any(d >= section.t_f / 2):
        raise StructureError(f"Corrosion depth {np.max(d):.3f} mm consumes the web or flanges")

    h = section.h - 2 * d
    b = section.b - 2 * d
    t_w = section.t_w - 2 * d
    t_f = section.t_f - 2 * d
    r = section.r
    h_w = h - 2 * t_f

    a_fillet = _FILLET_AREA * r**2
    e_fillet = _FILLET_CENTROID * r
    y_fillet = h / 2 - t_f - e_fillet
    i_fillet_own = _FILLET_LEG_INERTIA * r**4 - a_fillet * e_fillet**2

    area = 2 * b * t_f + h_w * t_w + 4 * a_fillet
    inertia = (b * h**3 - (b - t_w) * h_w**3) / 12.0 + 4 * (i_fillet_own + a_fillet * y_fillet**2)
    w_el = inertia / (h / 2)
    w_pl = b * t_f * (h - t_f) + t_w * h_w**2 / 4.0 + 4 * a_fillet * y_fillet

    return SectionProperties(
        h=_scalar(h), b=_scalar(b), t_w=_scalar(t_w), t_f=_scalar(t_f), r=r,
        area=_scalar(area), inertia=_scalar(inertia), w_el=_scalar(w_el), w_pl=_scalar(w_pl),
    )


def check_catalog(section: IPESection, tolerance: float = 0.02) -> SectionProperties:
    """Compare derived properties with the catalogue and log discrepancies.

    Raises:
        StructureError: If the derived inertia misses the catalogue value by more than ``tolerance``.
    """
    props = section_properties(section)
    if abs(props.inertia / section.catalog_inertia - 1) > tolerance:
        raise StructureError(
            f"Derived inertia {props.inertia:.4g} mm⁴ differs from catalogue {section.catalog_inertia:.4g} mm⁴"
        )
    if abs(props.area / section.catalog_area - 1) > tolerance:
        logger.warning(
            "%s: catalogue area %.6g mm² disagrees with plate geometry %.6g mm²; using the derived value",
            section.name, section.catalog_area, props.area,
        )
    for label, derived, listed in (("W_el", props.w_el, section.catalog_w_el), ("W_pl", props.w_pl, section.catalog_w_pl)):
        if abs(derived / listed - 1) > tolerance:
            logger.warning("%s: derived %s %.6g differs from catalogue %.6g", section.name, label, derived, listed)
    return props


def equivalent_stiffness(e_mpa, inertia, length_mm: float, r_fast=0.0, boundary_factor: float = 384.0):
    """Bending stiffness k = ρ E I / L³ · (1 - r) in N/m.

    Raises:
        StructureError: If inputs are non-positive or r is outside [0, 1).
    """
    e = np.asarray(e_mpa, dtype=float)
    i = np.asarray(inertia, dtype=float)
    r = np.asarray(r_fast, dtype=float)
    if np.any(e <= 0) or np.any(i <= 0) or length_mm <= 0:
        raise StructureError("E, I and L must be positive")
    if np.any(r < 0) or np.any(r >= 1):
        raise StructureError("Fast decay rate must be in [0, 1)")
    k_n_per_mm = boundary_factor * e * i / length_mm**3 * (1.0 - r)
    return _scalar(k_n_per_mm * 1e3)


def corrosion_mass_loss(beam: BeamModel, corroded_area) -> object:
    """Steel mass lost over the span (kg) for the corroded cross-section area (mm²)."""
    intact = section_properties(beam.section).area
    lost_m2 = (intact - np.asarray(corroded_area, dtype=float)) * 1e-6
    return _scalar(beam.steel_density * lost_m2 * beam.length_mm / 1000.0)


def equivalent_mass(p_des, length_mm: float, mass_loss=0.0, participation: float = 1.0, gravity: float = 9.81):
    """Vibrating mass m = participation · p L / g - Δm (kg).

    Raises:
        StructureError: If the load or the resulting mass is non-positive.
    """
    p = np.asarray(p_des, dtype=float)
    if np.any(p <= 0):
        raise StructureError("Design load must be positive")
    mass = participation * p * 1e3 * (length_mm / 1000.0) / gravity - np.asarray(mass_loss, dtype=float)
    if np.any(mass <= 0):
        raise StructureError("Equivalent mass is non-positive")
    return _scalar(mass)


def analytical_frequency(k, m):
    """Undamped natural frequency (Hz)."""
    return _scalar(np.sqrt(np.asarray(k, dtype=float) / np.asarray(m, dtype=float)) / (2 * np.pi))


def sdof_params(k: float, m: float, zeta: float = 0.05) -> SdofParams:
    if k <= 0 or m <= 0:
        raise StructureError("Stiffness and mass must be positive")
    return SdofParams(k=k, m=m, c=2 * zeta * math.sqrt(k * m), f_n=analytical_frequency(k, m))


def midspan_deflection(p_des, e_mpa, inertia, length_mm: float, boundary_factor: float = 384.0):
    """Euler-Bernoulli midspan deflection δ = p L⁴ / (ρ E I) in mm."""
    p = np.asarray(p_des, dtype=float)
    e = np.asarray(e_mpa, dtype=float)
    i = np.asarray(inertia, dtype=float)
    if np.any(e <= 0) or np.any(i <= 0) or length_mm <= 0:
        raise StructureError("E, I and L must be positive")
    return _scalar(p * length_mm**4 / (boundary_factor * e * i))


def dead_loads(beam: BeamModel) -> DeadLoads:
    """Beam self-weight, slab weight over the tributary width and the non-structural load."""
    area_m2 = section_properties(beam.section).area * 1e-6
    beam_self = beam.steel_density * area_m2 * beam.gravity / 1e3
    slab = beam.slab_thickness_mm / 1000.0 * beam.tributary_width_m * beam.concrete_density * beam.gravity / 1e3
    return DeadLoads(beam=beam_self, slab=slab, non_structural=beam.non_structural_dead_load)


def resisting_moment(props: SectionProperties, f_yd: float, plastic: bool = False):
    """W f_yd in kN·m."""
    modulus = props.w_pl if plastic else props.w_el
    return _scalar(np.asarray(modulus) * f_yd / 1e6)


def acting_moment_uls(p_uls, length_mm: float):
    """Fixed-end support moment p L² / 12 in kN·m."""
    return _scalar(np.asarray(p_uls, dtype=float) * (length_mm / 1000.0) ** 2 / 12.0)


def moment_check(props: SectionProperties, f_yd: float, m_acting: float) -> MomentCheck:
    m_el = resisting_moment(props, f_yd)
    m_pl = resisting_moment(props, f_yd, plastic=True)
    if m_acting <= m_el:
        state = MomentState.ELASTIC
    elif m_acting <= m_pl:
        state = MomentState.PLASTIC
    else:
        state = MomentState.FAILED
    return MomentCheck(acting=m_acting, elastic_resistance=m_el, plastic_resistance=m_pl, state=state)


def corroded_moment_check(beam: BeamModel, corrosion_depth: float, p_q_uls: float, gamma_g1: float = 1.3,
                          gamma_g2: float = 1.5, gamma_q: float = 1.5) -> MomentCheck:
    """ULS support-moment check of the section left after ``corrosion_depth`` mm of uniform loss.

    The acting moment uses the catalogue dead loads; only the resistance is reduced.
    """
    dead = dead_loads(beam)
    p_uls = gamma_g1 * dead.structural + gamma_g2 * dead.non_structural + gamma_q * p_q_uls
    props = section_properties(beam.section, corrosion_depth)
    return moment_check(props, beam.f_yd_mpa, acting_moment_uls(p_uls, beam.length_mm))


def plastic_decay_rate(m_r_el: float, m_a_max: float) -> float:
    """Stiffness decay that would exhaust the elastic moment reserve.

    A negative value means the acting moment already exceeds the elastic
    resistance; it is returned and logged rather than raised.

    Raises:
        StructureError: If the resisting moment is not positive.
    """
    if m_r_el <= 0:
        raise StructureError("Resisting moment must be positive")
    rate = (m_r_el - m_a_max) / m_r_el
    if rate < 0:
        logger.warning("Acting moment %.2f kN·m exceeds elastic resistance %.2f kN·m", m_a_max, m_r_el)
    return rate


def serviceability_decay_rate(delta_des: float, delta_lim: float) -> float:
    """Stiffness decay that would bring the deflection to its limit.

    Raises:
        StructureError: If the limit is not positive.
    """
    if delta_lim <= 0:
        raise StructureError("Deflection limit must be positive")
    rate = 1.0 - delta_des / delta_lim
    if rate < 0:
        logger.warning("Deflection %.3f mm already exceeds the limit %.3f mm", delta_des, delta_lim)
    return rate


def frequency_ratio(rate: float) -> float:
    """Δf / f_UD mapped from a stiffness decay rate as sqrt(r)."""
    if rate < 0:
        raise StructureError("Frequency mapping needs a non-negative decay rate")
    return math.sqrt(rate)


def limit_state_summary(beam: BeamModel, p_q_uls: float, gamma_g1: float = 1.3, gamma_g2: float = 1.5,
                        gamma_q: float = 1.5) -> LimitStateSummary:
    """Static checks of the undamaged beam at E0.

    Args:
        beam: Beam definition.
        p_q_uls: Live load (kN/m) used in the ULS combination, usually the realized maximum.
        gamma_g1: Partial factor for structural dead load.
        gamma_g2: Partial factor for non-structural dead load.
        gamma_q: Partial factor for live load.

    Returns:
        LimitStateSummary with deflections, moments and decay rates.
    """
    props = check_catalog(beam.section)
    dead = dead_loads(beam)
    delta_g = midspan_deflection(dead.total, beam.e0_mpa, props.inertia, beam.length_mm, beam.boundary_factor)
    delta_q = midspan_deflection(beam.reference_live_load, beam.e0_mpa, props.inertia, beam.length_mm,
                                 beam.boundary_factor)
    p_uls = gamma_g1 * dead.structural + gamma_g2 * dead.non_structural + gamma_q * p_q_uls
    m_a = acting_moment_uls(p_uls, beam.length_mm)
    m_r_el = resisting_moment(props, beam.f_yd_mpa)
    return LimitStateSummary(
        dead=dead,
        delta_g=delta_g,
        delta_q=delta_q,
        delta_lim=beam.deflection_limit_mm,
        m_r_el=m_r_el,
        m_r_pl=resisting_moment(props, beam.f_yd_mpa, plastic=True),
        m_a_uls=m_a,
        r_pl=plastic_decay_rate(m_r_el, m_a),
        r_lim=serviceability_decay_rate(delta_g, beam.deflection_limit_mm),
    )

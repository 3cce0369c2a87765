"""Tests for section properties, SDOF parameters and limit states."""

import logging
import math

import numpy as np
import pytest

from shm_bench.models import BeamModel, IPESection
from shm_bench.structure import (
    MomentState,
    StructureError,
    acting_moment_uls,
    analytical_frequency,
    check_catalog,
    corroded_moment_check,
    corrosion_mass_loss,
    dead_loads,
    equivalent_mass,
    equivalent_stiffness,
    frequency_ratio,
    limit_state_summary,
    midspan_deflection,
    moment_check,
    plastic_decay_rate,
    resisting_moment,
    sdof_params,
    section_properties,
    serviceability_decay_rate,
)


@pytest.fixture(scope="module")
def beam():
    return BeamModel()


class TestSectionProperties:
    """IPE400 plate-and-fillet geometry."""

    def test_intact_section_matches_catalogue(self, beam):
        props = section_properties(beam.section)
        assert props.inertia == pytest.approx(231.3e6, rel=0.005)
        assert props.w_el == pytest.approx(1156e3, rel=0.005)
        assert props.w_pl == pytest.approx(1307e3, rel=0.005)
        assert props.area == pytest.approx(8446, rel=0.005)

    def test_corrosion_reduces_every_property(self, beam):
        intact = section_properties(beam.section)
        corroded = section_properties(beam.section, 0.5)
        assert corroded.t_f == pytest.approx(beam.section.t_f - 1.0)
        assert corroded.h == pytest.approx(beam.section.h - 1.0)
        assert corroded.r == beam.section.r
        for name in ("area", "inertia", "w_el", "w_pl"):
            assert getattr(corroded, name) < getattr(intact, name)

    def test_vectorised_depths(self, beam):
        depths = np.array([0.0, 0.1, 0.2])
        props = section_properties(beam.section, depths)
        assert props.inertia.shape == (3,)
        assert np.all(np.diff(props.inertia) < 0)
        assert props.inertia[0] == pytest.approx(section_properties(beam.section).inertia)

    def test_corroded_section_from_plates_and_fillets(self, beam):
        d = 0.1
        s = beam.section
        h, b, t_w, t_f, r = s.h - 2 * d, s.b - 2 * d, s.t_w - 2 * d, s.t_f - 2 * d, s.r
        h_w = h - 2 * t_f

        # Fillet: r x r square minus a quarter disc, measured from the flange face
        a_quarter = math.pi * r**2 / 4
        y_quarter = r - 4 * r / (3 * math.pi)
        i_quarter = (math.pi / 16 - 4 / (9 * math.pi)) * r**4 + a_quarter * y_quarter**2
        a_fillet = r**2 - a_quarter
        y_fillet = (r**2 * r / 2 - a_quarter * y_quarter) / a_fillet
        i_fillet = r**4 / 3 - i_quarter - a_fillet * y_fillet**2
        arm = h / 2 - t_f - y_fillet

        flanges = 2 * (b * t_f**3 / 12 + b * t_f * ((h - t_f) / 2) ** 2)
        web = t_w * h_w**3 / 12
        inertia = flanges + web + 4 * (i_fillet + a_fillet * arm**2)
        area = 2 * b * t_f + t_w * h_w + 4 * a_fillet
        w_pl = 2 * b * t_f * (h - t_f) / 2 + 2 * t_w * (h_w / 2) ** 2 / 2 + 4 * a_fillet * arm

        props = section_properties(s, d)
        assert props.area == pytest.approx(area, rel=1e-9)
        assert props.inertia == pytest.approx(inertia, rel=1e-9)
        assert props.w_el == pytest.approx(inertia / (h / 2), rel=1e-9)
        assert props.w_pl == pytest.approx(w_pl, rel=1e-9)

    def test_invalid_depths(self, beam):
        with pytest.raises(StructureError):
            section_properties(beam.section, -0.1)
        with pytest.raises(StructureError):
            section_properties(beam.section, beam.section.t_w / 2)

    def test_catalogue_area_discrepancy_is_logged(self, beam, caplog):
        with caplog.at_level(logging.WARNING, logger="shm_bench.structure"):
            check_catalog(beam.section)
        assert "area" in caplog.text

    def test_catalogue_inertia_mismatch_raises(self):
        with pytest.raises(StructureError):
            check_catalog(IPESection(catalog_inertia=300e6))


class TestDeadLoadsAndDeflection:
    """Permanent loads and static deflections of the intact beam."""

    def test_dead_loads(self, beam):
        dead = dead_loads(beam)
        assert dead.beam == pytest.approx(0.650, rel=0.005)
        assert dead.slab == pytest.approx(22.07, rel=0.005)
        assert dead.total == pytest.approx(28.72, rel=0.005)

    def test_dead_and_live_deflection(self, beam):
        inertia = section_properties(beam.section).inertia
        delta_g = midspan_deflection(dead_loads(beam).total, beam.e0_mpa, inertia, beam.length_mm)
        delta_q = midspan_deflection(15.0, beam.e0_mpa, inertia, beam.length_mm)
        assert delta_g == pytest.approx(1.99, rel=0.005)
        assert delta_q == pytest.approx(1.04, rel=0.005)

    def test_deflection_scales_with_modulus(self, beam):
        inertia = section_properties(beam.section).inertia
        stiff = midspan_deflection(30.0, 210000.0, inertia, beam.length_mm)
        soft = midspan_deflection(30.0, 105000.0, inertia, beam.length_mm)
        assert soft == pytest.approx(2 * stiff)


class TestSdof:
    """Stiffness, mass and natural frequency."""

    def test_stiffness(self, beam):
        inertia = section_properties(beam.section).inertia
        assert equivalent_stiffness(beam.e0_mpa, inertia, beam.length_mm) == pytest.approx(8.635e7, rel=0.005)

    def test_stiffness_decay(self, beam):
        inertia = section_properties(beam.section).inertia
        k0 = equivalent_stiffness(beam.e0_mpa, inertia, beam.length_mm)
        k1 = equivalent_stiffness(beam.e0_mpa, inertia, beam.length_mm, r_fast=0.1)
        assert k1 == pytest.approx(0.9 * k0)
        with pytest.raises(StructureError):
            equivalent_stiffness(beam.e0_mpa, inertia, beam.length_mm, r_fast=1.0)

    def test_mass(self, beam):
        assert equivalent_mass(43.72, beam.length_mm) == pytest.approx(26740, rel=0.005)
        with pytest.raises(StructureError):
            equivalent_mass(0.0, beam.length_mm)

    def test_mass_loss_from_corrosion(self, beam):
        corroded = section_properties(beam.section, 0.5).area
        loss = corrosion_mass_loss(beam, corroded)
        assert loss > 0
        assert equivalent_mass(43.72, beam.length_mm, loss) < equivalent_mass(43.72, beam.length_mm)

    def test_natural_frequency(self, beam):
        inertia = section_properties(beam.section).inertia
        k = equivalent_stiffness(beam.e0_mpa, inertia, beam.length_mm)
        m = equivalent_mass(43.72, beam.length_mm)
        assert analytical_frequency(k, m) == pytest.approx(9.04, abs=0.05)

    def test_sdof_params_damping(self):
        params = sdof_params(4.0e6, 1.0e4, zeta=0.05)
        assert params.c == pytest.approx(2 * 0.05 * math.sqrt(4.0e10))
        assert params.f_n == pytest.approx(20.0 / (2 * math.pi))


class TestLimitStates:
    """Moments and decay rates."""

    def test_resisting_and_acting_moments(self, beam):
        props = section_properties(beam.section)
        assert resisting_moment(props, beam.f_yd_mpa) == pytest.approx(258.84, rel=0.005)
        assert acting_moment_uls(61.04, beam.length_mm) == pytest.approx(183.12, rel=1e-4)
        assert acting_moment_uls(67.20, beam.length_mm) == pytest.approx(201.60, rel=1e-4)

    def test_moment_check_states(self, beam):
        props = section_properties(beam.section)
        assert moment_check(props, beam.f_yd_mpa, 183.12).state is MomentState.ELASTIC
        assert moment_check(props, beam.f_yd_mpa, 280.0).state is MomentState.PLASTIC
        assert moment_check(props, beam.f_yd_mpa, 400.0).state is MomentState.FAILED

    def test_corroded_moment_check(self, beam):
        intact = corroded_moment_check(beam, 0.0, 19.11)
        assert intact.acting == pytest.approx(201.6, rel=0.005)
        assert intact.state is MomentState.ELASTIC
        assert corroded_moment_check(beam, 1.7, 19.11).state is MomentState.PLASTIC
        corroded = corroded_moment_check(beam, 3.4, 19.11)
        assert corroded.state is MomentState.FAILED
        assert corroded.acting == pytest.approx(intact.acting)

    def test_limit_state_summary(self, beam):
        summary = limit_state_summary(beam, p_q_uls=15.0)
        assert summary.m_a_uls == pytest.approx(183.12, rel=0.005)
        assert summary.m_r_el == pytest.approx(258.84, rel=0.005)
        assert summary.r_pl == pytest.approx(0.2925, abs=0.001)
        assert summary.r_lim == pytest.approx(0.917, abs=0.001)
        assert summary.frequency_drop_pl == pytest.approx(math.sqrt(summary.r_pl))

    def test_negative_plastic_rate_is_logged(self, caplog):
        with caplog.at_level(logging.WARNING, logger="shm_bench.structure"):
            assert plastic_decay_rate(100.0, 120.0) == pytest.approx(-0.2)
        assert "exceeds" in caplog.text

    def test_serviceability_rate(self):
        assert serviceability_decay_rate(6.0, 24.0) == pytest.approx(0.75)
        with pytest.raises(StructureError):
            serviceability_decay_rate(1.0, 0.0)

    def test_frequency_ratio(self):
        assert frequency_ratio(0.25) == pytest.approx(0.5)
        with pytest.raises(StructureError):
            frequency_ratio(-0.1)

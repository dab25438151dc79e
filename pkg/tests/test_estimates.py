"""Unit tests for the estimate checkers: report types, gating, trends,
small-grid runs, negative controls, and serialization."""

import json
import math

import numpy as np
import pytest
import scipy.integrate
from scipy.special import gamma as sp_gamma

from roughheat.estimates import (
    LEMMA_SLUGS,
    EstimateReport,
    LemmaCheck,
    LemmaId,
    VerificationRun,
    WeightFn,
    _drift,
    _grouped_scans,
    _Scan,
    _trend_from_scans,
    check_parseval_scaling,
    check_tail_integral,
    check_two_sided_bound,
    check_weighted_convolution,
    default_grid,
    lemma_slug,
    make_check,
    make_weight,
    merge_reports,
    report_to_dict,
    run_lemma,
    run_to_csv,
    run_to_json,
    run_verification,
)
from roughheat.exceptions import ConfigError, DomainError, InputError
from roughheat.fitting import PowerLawFit
from roughheat.kernel import KernelSpec
from roughheat.quadrature import _peak_ladder, weighted_difference_integral


# ---------------------------------------------------------------------------
# weight function


def test_weight_normalization_matches_beta_closed_form():
    # int (1+x^2)^(-lam) dx = sqrt(pi) Gamma(lam - 1/2) / Gamma(lam)
    for lam in (0.6, 1.0, 1.7):
        w = make_weight(lam)
        mass = math.sqrt(math.pi) * sp_gamma(lam - 0.5) / sp_gamma(lam)
        assert w.normalization == pytest.approx(1.0 / mass, rel=1e-9)


def test_weight_call_is_normalized_raw():
    w = make_weight(0.6)
    xs = np.array([0.0, 1.0, -3.5])
    assert np.allclose(w(xs), w.normalization * w.raw(xs))
    assert w.raw(0.0) == 1.0


def test_weight_unit_mass_numerically():
    # the lam = 0.6 tail decays like |x|**-1.2: no finite window holds the
    # mass, so integrate the half line and double
    for lam in (0.6, 1.7):
        w = make_weight(lam)
        half, err = scipy.integrate.quad(w, 0.0, np.inf)
        assert 2.0 * half == pytest.approx(1.0, abs=1e-6)


def test_make_weight_rejects_nonintegrable_exponent():
    with pytest.raises(DomainError):
        make_weight(0.5)


def test_make_weight_caches():
    assert make_weight(0.7) is make_weight(0.7)


def test_weight_rejects_bad_normalization():
    with pytest.raises(DomainError):
        WeightFn(exponent=0.6, normalization=0.0)


# ---------------------------------------------------------------------------
# report invariants and merging


def _report(const=2.0, trend=0.0, passed=True, fits=(), intercept_ok=True,
            lemma=LemmaId.TailIntegral, rows=()):
    return EstimateReport(
        lemma_id=lemma,
        fitted_constant=const,
        worst_node=(1.0,),
        trend_slope=trend,
        passed=passed,
        notes="synthetic",
        fits=fits,
        intercept_ok=intercept_ok,
        rows=rows,
    )


def test_report_rejects_inconsistent_pass_flag():
    with pytest.raises(InputError):
        _report(const=math.inf, passed=True)
    with pytest.raises(InputError):
        _report(trend=0.5, passed=True)
    with pytest.raises(InputError):
        _report(passed=False)  # everything fine, flag says failed


def test_report_pass_requires_fits_and_intercept():
    bad_fit = PowerLawFit(
        slope=-1.0, intercept=1.0, r_squared=1.0,
        expected=-1.2, tolerance=0.01, passed=False,
    )
    rep = _report(passed=False, fits=(bad_fit,))
    assert not rep.passed
    rep = _report(passed=False, intercept_ok=False)
    assert not rep.passed


def test_merge_reports_is_associative_and_commutative():
    fit = PowerLawFit(
        slope=-1.2, intercept=3.0, r_squared=1.0,
        expected=-1.2, tolerance=0.01, passed=True,
    )
    a = _report(const=2.0, trend=0.001, rows=(((1.0,), 2.0, 1.0, 2.0),))
    b = _report(const=5.0, trend=0.003, fits=(fit,), rows=(((2.0,), 5.0, 1.0, 5.0),))
    c = _report(const=1.0, trend=0.010, rows=(((3.0,), 1.0, 1.0, 1.0),))
    ab_c = merge_reports(merge_reports(a, b), c)
    a_bc = merge_reports(a, merge_reports(b, c))
    assert ab_c == a_bc
    assert merge_reports(a, b) == merge_reports(b, a)
    assert ab_c.fitted_constant == 5.0
    assert ab_c.trend_slope == 0.010
    assert len(ab_c.rows) == 3


def test_merge_reports_rejects_mixed_lemmas():
    a = _report()
    b = _report(lemma=LemmaId.WeightedD)
    with pytest.raises(InputError):
        merge_reports(a, b)


# ---------------------------------------------------------------------------
# drift and trend semantics


def test_drift_recovers_power_law_slopes():
    xs = np.geomspace(1e-2, 1e2, 33)
    d = _drift(xs, xs**0.3)
    assert d is not None
    s_lo, s_hi = d
    assert s_lo == pytest.approx(0.3, abs=1e-10)
    assert s_hi == pytest.approx(0.3, abs=1e-10)


def test_drift_needs_a_decade_of_data():
    xs = np.geomspace(1.0, 5.0, 10)
    assert _drift(xs, np.ones_like(xs)) is None


def test_trend_respects_end_flags():
    # ratio grows toward small coord only
    xs = np.geomspace(1e-3, 1e3, 25)
    ratios = 1.0 + xs ** (-0.5)
    nodes = tuple((float(x),) for x in xs)
    ratio_of = dict(zip(nodes, ratios))
    both = _Scan("s", tuple(xs), nodes, ends=(True, True))
    high_only = _Scan("s", tuple(xs), nodes, ends=(False, True))
    assert _trend_from_scans([both], ratio_of) > 0.3
    assert _trend_from_scans([high_only], ratio_of) < 0.01


def test_trend_two_sided_flags_decay_as_well():
    xs = np.geomspace(1e-3, 1e3, 25)
    ratios = xs**-0.4  # decays: fine for an upper bound, fatal two-sided
    nodes = tuple((float(x),) for x in xs)
    ratio_of = dict(zip(nodes, ratios))
    # only the high end is an unbounded limit here; with the low end flagged
    # too, the same power law would read as growth toward that end
    scan = _Scan("s", tuple(xs), nodes, ends=(False, True))
    assert _trend_from_scans([scan], ratio_of) < 0.01
    assert _trend_from_scans([scan], ratio_of, two_sided=True) > 0.3


def test_grouped_scans_extracts_one_dim_families():
    nodes = [(float(t), 0.0) for t in np.geomspace(0.1, 10, 7)]
    nodes += [(1.0, float(x)) for x in np.geomspace(1, 100, 6)]
    scans = _grouped_scans(nodes, ends_by_coord={1: (False, True)})
    labels = {s.label.split("@")[0] for s in scans}
    assert labels == {"vary-0", "vary-1"}
    x_scan = next(s for s in scans if s.label.startswith("vary-1"))
    assert x_scan.ends == (False, True)


# ---------------------------------------------------------------------------
# hypothesis gating


def test_lemma_check_rejects_alpha_outside_open_interval():
    grid = ((1.0, 0.0),)
    for bad in (1.0, 2.0, 0.5, 2.5):
        with pytest.raises(ConfigError) as exc:
            LemmaCheck(LemmaId.TwoSidedBound, alpha=bad, grid=grid)
        assert exc.value.schema_path == "alpha"


def test_negative_control_admits_alpha_two_but_not_beyond():
    grid = ((1.0, 0.0),)
    LemmaCheck(LemmaId.TwoSidedBound, alpha=2.0, grid=grid, negative_control=True)
    with pytest.raises(DomainError):
        LemmaCheck(LemmaId.TwoSidedBound, alpha=2.5, grid=grid, negative_control=True)


def test_weighted_checks_gate_H():
    grid = ((1.0, 0.0),)
    with pytest.raises(ConfigError) as exc:
        LemmaCheck(LemmaId.WeightedD, H=0.6, grid=grid)
    assert exc.value.schema_path == "H"
    with pytest.raises(ConfigError):
        LemmaCheck(LemmaId.TailIntegral, H=0.5, grid=grid)


def test_lambda_checks_gate_H_against_alpha():
    grid = ((1.0,),)
    # (3 - 1.5)/4 = 0.375: H = 0.35 is below the admissible band
    with pytest.raises(ConfigError) as exc:
        LemmaCheck(LemmaId.WeightedDifferenceLambda, alpha=1.5, H=0.35, grid=grid)
    assert exc.value.schema_path == "H"
    LemmaCheck(LemmaId.WeightedDifferenceLambda, alpha=1.5, H=0.4, grid=grid)


def test_convolution_gates_q_and_weight_exponent():
    grid = ((1.0,),)
    with pytest.raises(ConfigError) as exc:
        LemmaCheck(LemmaId.WeightedConvolution, grid=grid)
    assert exc.value.schema_path == "q"
    with pytest.raises(ConfigError):
        LemmaCheck(LemmaId.WeightedConvolution, q=0.3, grid=grid)
    with pytest.raises(ConfigError) as exc:
        LemmaCheck(LemmaId.WeightedConvolution, q=1.0, lambda_exponent=0.9, grid=grid)
    assert exc.value.schema_path == "lambda_exponent"
    LemmaCheck(LemmaId.WeightedConvolution, q=1.0, lambda_exponent=0.6, grid=grid)
    # the square variant pins q = 2 regardless of the q field
    LemmaCheck(LemmaId.WeightedConvolutionSquare, grid=grid)


def test_empty_grid_rejected():
    with pytest.raises(InputError):
        LemmaCheck(LemmaId.TwoSidedBound, grid=())


def test_make_check_defaults_q_for_plain_convolution():
    check = make_check(LemmaId.WeightedConvolution)
    assert check.q == 1.0


def test_default_grids_nonempty_for_every_lemma():
    for lid in LemmaId:
        grid = default_grid(lid)
        assert len(grid) > 0
        assert all(isinstance(n, tuple) for n in grid)


# ---------------------------------------------------------------------------
# slugs


def test_slugs_are_a_bijection():
    assert len(LEMMA_SLUGS) == len(LemmaId)
    assert set(LEMMA_SLUGS.values()) == set(LemmaId)
    for slug, lid in LEMMA_SLUGS.items():
        assert lemma_slug(lid) == slug


# ---------------------------------------------------------------------------
# small-grid checker runs


def _small_tx_grid():
    # the x-scan must reach deep into the tail: the envelope's
    # (t^(1/alpha)+|x|) shift contributes a ~(1+alpha)/x transient to the
    # ratio slope, so the outermost decade needs x >~ 100
    nodes = [(float(t), 0.0) for t in np.geomspace(0.1, 10.0, 9)]
    nodes += [(1.0, float(x)) for x in np.geomspace(0.5, 1000.0, 10)]
    return tuple(nodes)


def test_two_sided_small_grid_passes():
    rep = run_lemma(make_check(LemmaId.TwoSidedBound, grid=_small_tx_grid()))
    assert rep.passed
    assert rep.lemma_id is LemmaId.TwoSidedBound
    assert math.isfinite(rep.fitted_constant)
    assert rep.fitted_constant < 50.0
    assert all(r[3] > 0 for r in rep.rows)


def test_two_sided_fails_for_gaussian_tails():
    # at alpha = 2 the kernel decays faster than any power: the lower half
    # of the two-sided envelope is violated at moderate distance already
    spec = KernelSpec(alpha=2.0)
    grid = [(1.0, float(x)) for x in np.geomspace(1.0, 1000.0, 12)]
    grid += [(float(t), 0.0) for t in np.geomspace(0.2, 5.0, 6)]
    rep = check_two_sided_bound(spec, grid=grid)
    assert not rep.passed
    spec_ok = KernelSpec(alpha=1.5)
    assert check_two_sided_bound(spec_ok, grid=grid).passed


def test_gradient_small_grid_merges_both_orders():
    rep = run_lemma(make_check(LemmaId.GradientBound, grid=_small_tx_grid()))
    assert rep.passed
    # rows from k=1 and k=2 share nodes but not lhs values, so the merged
    # row set is strictly larger than one order's
    assert len(rep.rows) > len(_small_tx_grid())


def test_temporal_small_grid():
    # x-scan at fixed (s, t): both sides share the t*|x|^(-1-alpha) tail, so
    # the ratio settles to 1 and the custom-grid trend stays flat.  An
    # s-scan cannot pass here: the ratio grows toward s -> t by design of
    # the envelope, and the generic scan extractor flags that end.
    grid = [(1.0, 1.5, float(x)) for x in np.geomspace(0.5, 1000.0, 8)]
    rep = run_lemma(make_check(LemmaId.TemporalIncrement, grid=grid))
    assert rep.passed
    assert rep.fitted_constant < 10.0


def test_temporal_rejects_unordered_nodes():
    with pytest.raises(DomainError):
        run_lemma(make_check(LemmaId.TemporalIncrement, grid=[(2.0, 1.0, 0.0)] * 6))


def test_tail_integral_default_grid_passes():
    rep = check_tail_integral(0.4)
    assert rep.passed
    assert rep.trend_slope <= rep.trend_tol
    # the weight-normalized tail ratio approaches 4/(1-2H) + 2 = 22 from
    # below, so the fitted constant sits under that bound
    assert 10.0 < rep.fitted_constant < 22.0
    assert "1.42857" in rep.notes


def test_tail_integral_custom_grid():
    rep = check_tail_integral(0.25, x_grid=np.geomspace(1.0, 1e4, 21))
    assert rep.passed
    assert rep.fitted_constant < 10.0


def test_weighted_d_scaling_identity():
    # W(t, 0) = t^((2H-3)/alpha) W(1, 0): exact by kernel self-similarity
    spec = KernelSpec(alpha=1.5)
    base = weighted_difference_integral(spec, 0.4, 1.0, 0.0, rel_tol=1e-7).value
    for t in (0.25, 4.0):
        v = weighted_difference_integral(spec, 0.4, t, 0.0, rel_tol=1e-7).value
        assert v == pytest.approx(base * t ** ((2 * 0.4 - 3.0) / 1.5), rel=1e-5)


# ---------------------------------------------------------------------------
# parseval reports and negative controls


def test_parseval_d_report_small():
    rep = run_lemma(make_check(LemmaId.ParsevalD))
    assert rep.passed
    assert rep.intercept_ok
    assert len(rep.fits) == 1
    fit = rep.fits[0]
    assert fit.expected == pytest.approx(-(1.0 + 2.0 * (0.5 - 0.4)) / 1.5)
    assert abs(fit.slope - fit.expected) < 1e-4
    # fitted constant is the intercept, which matches the frequency route
    assert rep.fitted_constant == pytest.approx(fit.intercept)


def test_parseval_negative_control_fails():
    fit = check_parseval_scaling(1.5, 0.1, negative_control=True)
    assert not fit.passed
    assert fit.expected == pytest.approx(-(1.0 + 0.2) / 1.5 + 0.2)


def test_parseval_scaling_rejects_bad_beta():
    with pytest.raises(DomainError):
        check_parseval_scaling(1.5, 0.75)


def test_convolution_negative_control_fails():
    ts = tuple(np.geomspace(2e-3, 0.08, 6))
    rep = check_weighted_convolution(
        1.5, 1.0, 0.6, t_grid=ts, negative_control=True
    )
    assert not rep.passed
    assert any(not f.passed for f in rep.fits)
    assert "negative control" in rep.notes


# ---------------------------------------------------------------------------
# runs and serialization


def test_run_verification_single_lemma_roundtrip(tmp_path):
    run = run_verification(lemma_ids=[LemmaId.TailIntegral])
    assert isinstance(run, VerificationRun)
    assert run.all_passed
    assert len(run.run_id) == 12
    int(run.run_id, 16)

    doc = json.loads(run_to_json(run))
    assert doc["run_id"] == run.run_id
    assert doc["all_passed"]
    rep_doc = doc["reports"]["TailIntegral"]
    assert rep_doc["passed"]
    assert rep_doc["n_nodes"] == len(run.reports["TailIntegral"].rows)

    csv_path = tmp_path / "rows.csv"
    run_to_csv(run, str(csv_path))
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "lemma_id,node,lhs,rhs,ratio"
    assert len(lines) == 1 + rep_doc["n_nodes"]
    first = lines[1].split(",")
    assert first[0] == "TailIntegral"
    assert float(first[4]) == pytest.approx(float(first[2]) / float(first[3]), rel=1e-9)


def test_report_to_dict_fields():
    rep = check_tail_integral(0.4, x_grid=np.geomspace(1.0, 100.0, 11))
    d = report_to_dict(rep)
    assert d["lemma_id"] == "TailIntegral"
    assert set(d) == {
        "lemma_id", "fitted_constant", "worst_node", "trend_slope",
        "passed", "notes", "trend_tol", "intercept_ok", "fits", "n_nodes",
    }


def test_run_id_depends_on_parameters():
    a = run_verification(lemma_ids=[LemmaId.TailIntegral], H=0.4)
    b = run_verification(lemma_ids=[LemmaId.TailIntegral], H=0.45)
    assert a.run_id != b.run_id


# ---------------------------------------------------------------------------
# quadrature support used by the checkers


def test_peak_ladder_geometry():
    assert _peak_ladder(0.0, 1.0) == ()
    assert _peak_ladder(3.0, 1.0) == (3.0,)
    pts = _peak_ladder(1000.0, 1.0)
    assert 1000.0 in pts
    assert all(p > 0 for p in pts)
    assert pts == tuple(sorted(pts))
    # graded: the two finest gaps match, then neighbouring gaps double
    above = [p for p in pts if p > 1000.0]
    gaps = np.diff([1000.0] + above)
    assert gaps[1] == pytest.approx(gaps[0])
    assert np.allclose(gaps[2:] / gaps[1:-1], 2.0)

"""
Tests for the experiment registry, the run context and the fast acceptance criteria
"""

import pytest

from bergman_lab.archive import archive_name, write_configuration
from bergman_lab.errors import ArchiveError, ArgumentError
from bergman_lab.experiments import (
    CRITERION_IDS, EXPERIMENTS, RunContext, criterion_experiments, default_config, function_from_name,
    get_experiment, pluriharmonic_example, run_acceptance, run_experiment, spec_from_config, summarize,
)
from bergman_lab.models import CriterionResult, GafSpec, HkpvSpec


def test_every_criterion_has_one_owner():
    owners = criterion_experiments()
    assert sorted(owners) == list(CRITERION_IDS)
    claimed = [e.criterion for e in EXPERIMENTS.values() if e.criterion is not None]
    assert len(claimed) == len(set(claimed))


def test_default_configs_validate():
    for name in EXPERIMENTS:
        config = default_config(name)
        assert config.experiment == name
    assert default_config("hardy").generator == "hkpv"
    assert default_config("pluriharmonic").dimension == 2
    assert default_config("sharp", seed_base=9).seed_base == 9


def test_unknown_experiment():
    with pytest.raises(ArgumentError, match="unknown experiment"):
        get_experiment("nope")


def test_function_names():
    assert function_from_name("constant").kind == "constant"
    assert function_from_name("monomial:3").n == [3]
    assert function_from_name("monomial:1.2", d=2).n == [1, 2]
    assert function_from_name("poisson", d=2).kind == "poisson_szego"
    assert function_from_name("hardy").is_vector
    kernel = function_from_name("kernel:standard_alpha:1.5")
    assert kernel.weight.alpha == 1.5
    assert function_from_name("kernel:log_supercritical:0.5").weight.gamma == 0.5
    assert function_from_name("pluri_example", d=2).kind == "pluriharmonic"
    with pytest.raises(ArgumentError):
        function_from_name("spline")
    with pytest.raises(ArgumentError):
        function_from_name("kernel:gaussian")
    with pytest.raises(ArgumentError):
        function_from_name("monomial:x")


def test_pluriharmonic_example_values():
    f = pluriharmonic_example(2)
    z = [0.3 + 0.2j, 0.1 - 0.4j]
    expected = 0.3 + ((0.3 + 0.2j) * (0.1 - 0.4j)).imag
    assert f.evaluate(z) == pytest.approx(expected)
    with pytest.raises(ArgumentError):
        pluriharmonic_example(1)


def test_spec_from_config():
    assert isinstance(spec_from_config(default_config("intensity")), GafSpec)
    assert isinstance(spec_from_config(default_config("hardy")), HkpvSpec)
    with pytest.raises(ArgumentError):
        spec_from_config(default_config("intensity", dimension=2))


def test_run_context_caches_configurations():
    ctx = RunContext(seeds=[1, 2])
    spec = GafSpec(window_radius=1.5)
    first = ctx.configurations(spec, [1, 2])
    again = ctx.configurations(spec, [2, 1])
    assert again[0] is first[1]
    assert ctx.seeds_for(default_config("sharp")) == [1, 2]
    assert RunContext().seeds_for(default_config("hardy")) == list(range(1000, 1050))


def test_run_context_reads_archives(tmp_path, disk_config):
    write_configuration(disk_config, tmp_path / archive_name("gaf", 1, disk_config.seed))
    ctx = RunContext(archive_dir=tmp_path)
    loaded = ctx.configurations(GafSpec(window_radius=2.0), [disk_config.seed])
    assert loaded[0].points == disk_config.points
    with pytest.raises(ArchiveError, match="missing"):
        ctx.configurations(GafSpec(window_radius=2.0), [12])
    with pytest.raises(ArchiveError, match="smaller"):
        RunContext(archive_dir=tmp_path).configurations(GafSpec(window_radius=4.0), [disk_config.seed])


def test_summarize_marks_missing_criteria_incomplete():
    summary = summarize([CriterionResult(id=2, name="mass", status="pass")])
    assert summary["status"] == "incomplete"
    assert len(summary["criteria"]) == len(CRITERION_IDS)
    assert summary["criteria"][1]["status"] == "pass"
    assert summary["criteria"][0]["status"] == "incomplete"


def test_summarize_fail_dominates():
    results = [CriterionResult(id=i, name=str(i), status="pass") for i in CRITERION_IDS]
    assert summarize(results)["status"] == "pass"
    results[3] = CriterionResult(id=4, name="4", status="fail")
    assert summarize(results)["status"] == "fail"


def test_critical_mass_and_poincare_mass_pass():
    for result in run_acceptance([1, 2]):
        assert result.criterion.status == "pass", result.criterion.measured
        assert result.criterion.seconds is not None
        assert result.reports


def test_sharp_and_identity_criteria_pass():
    for name in ("sharp", "iz-identity", "impossibility"):
        result = run_experiment(default_config(name))
        assert result.command == "variance"
        assert result.criterion.status == "pass", result.criterion.measured


def test_run_acceptance_rejects_unknown_criteria():
    with pytest.raises(ArgumentError):
        run_acceptance([99])


@pytest.mark.slow
def test_claim_a_and_critical_kernel_criteria():
    for name in ("claimA", "critical-kernel", "critical-floor"):
        result = run_experiment(default_config(name))
        assert result.criterion.status == "pass", result.criterion.measured


@pytest.mark.slow
def test_tempered_single_criterion():
    result = run_experiment(default_config("tempered-single", n_configurations=5))
    assert result.criterion.status == "pass", result.criterion.measured
    assert len(result.estimates) == 5 * 3 * 2

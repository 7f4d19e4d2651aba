"""Seeded ensemble experiments: fused detections against their members."""

import math
import statistics
from pathlib import Path

import pytest

from cli_tools.reports import load_report_document
from core.cli import main
from core.registry import EXIT_OK
from evaluation.froc import fp_at_sensitivity
from fusion.models import FusionConfig
from simlab.experiment import ensemble_experiment
from simlab.models import DetectorProfile, SceneConfig

ACCEPTANCE_CONFIG = Path(__file__).resolve().parents[2] / "configs" / "acceptance.json"

# 3 detectors, Poisson(2) false positives, miss 0.1, 2px corner jitter, 200 images
ACCEPTANCE_SCENE = SceneConfig(seed=42, n_images=200)
ACCEPTANCE_PROFILES = [
    DetectorProfile(name=name, jitter_px=2.0, miss_prob=0.1, fp_rate=2.0)
    for name in ("retinanet", "foveabox", "vfnet")
]


@pytest.fixture(scope="module")
def acceptance_result():
    return ensemble_experiment(ACCEPTANCE_SCENE, ACCEPTANCE_PROFILES)


@pytest.mark.integration
@pytest.mark.slow
class TestEnsembleBeatsIndividuals:
    """The fused ensemble against each simulated detector on the acceptance scene."""

    def test_fused_sensitivity_at_4(self, acceptance_result):
        fused = acceptance_result.fused.sensitivity_at(4.0)
        for report in acceptance_result.individual:
            assert fused >= report.sensitivity_at(4.0), report.method

    def test_fused_map(self, acceptance_result):
        for report in acceptance_result.individual:
            assert acceptance_result.fused.mean_ap >= report.mean_ap, report.method

    @pytest.mark.parametrize("level", [0.5, 0.7, 0.8])
    def test_fewer_false_positives_at_fixed_sensitivity(self, acceptance_result, level):
        individual = [fp_at_sensitivity(r.curve, level) for r in acceptance_result.individual]
        median = statistics.median(individual)
        assert math.isfinite(median)
        assert fp_at_sensitivity(acceptance_result.fused.curve, level) <= median

    def test_report_shape(self, acceptance_result):
        assert acceptance_result.n_images == 200
        assert len(acceptance_result.rows()) == 5
        total = sum(b.n_annotations for b in acceptance_result.fused.bins)
        assert total == acceptance_result.n_annotations

    def test_frozen_numbers(self, acceptance_result, frozen):
        for report in acceptance_result.rows():
            key = f"acceptance/{report.method}"
            frozen.check(f"{key}/mean_ap", report.mean_ap)
            frozen.check(f"{key}/s_at_4", report.sensitivity_at(4.0))
            frozen.check(f"{key}/sensitivities", list(report.sensitivities))

    def test_rerun_is_identical(self, acceptance_result):
        again = ensemble_experiment(ACCEPTANCE_SCENE, ACCEPTANCE_PROFILES)
        assert again.model_dump_json() == acceptance_result.model_dump_json()


@pytest.mark.integration
class TestDegenerateEnsembles:
    """Ensembles whose members agree exactly."""

    def test_identical_noiseless_detectors(self):
        scene = SceneConfig(seed=3, n_images=40, lesions_per_image=(1, 1))
        oracle = DetectorProfile(name="oracle", jitter_px=0.0, miss_prob=0.0, fp_rate=0.0)
        result = ensemble_experiment(scene, [oracle, oracle, oracle])
        assert result.fused.mean_ap == 1.0
        assert result.fused.sensitivities == result.individual[0].sensitivities

    def test_duplicated_detector_matches_itself(self):
        scene = SceneConfig(seed=11, n_images=60)
        profile = DetectorProfile(name="copy")
        result = ensemble_experiment(scene, [profile, profile], FusionConfig())
        single = result.individual[0]
        assert result.individual[1].model_dump_json() == single.model_dump_json()
        # only boxes that overlap within one run can merge differently
        assert result.fused.mean_ap == pytest.approx(single.mean_ap, abs=0.01)
        assert result.fused.sensitivity_at(4.0) == pytest.approx(single.sensitivity_at(4.0), abs=0.01)


@pytest.mark.integration
@pytest.mark.slow
class TestAcceptancePipeline:
    """simulate -> fuse -> eval on the acceptance config reproduces the frozen numbers."""

    def test_cli_pipeline(self, tmp_path, frozen):
        sim = tmp_path / "sim"
        assert main(
            [
                "simulate",
                str(ACCEPTANCE_CONFIG),
                "--out-gt",
                str(sim / "gt.jsonl"),
                "--out-dets",
                str(sim / "dets_"),
                "--out-manifest",
                str(sim / "manifest.jsonl"),
            ]
        ) == EXIT_OK
        det_files = {p.name: sim / f"dets_{p.name}.jsonl" for p in ACCEPTANCE_PROFILES}
        fused = tmp_path / "fused.jsonl"
        assert main(["fuse", *map(str, det_files.values()), "--out", str(fused)]) == EXIT_OK

        for method, path in [*det_files.items(), ("Ensemble", fused)]:
            out = tmp_path / f"{method}.json"
            code = main(
                [
                    "eval",
                    str(path),
                    str(sim / "gt.jsonl"),
                    "--stratify",
                    "--manifest",
                    str(sim / "manifest.jsonl"),
                    "--method-name",
                    method,
                    "--out-json",
                    str(out),
                ]
            )
            assert code == EXIT_OK
            report = load_report_document(out).report
            frozen.check(f"acceptance/{method}/mean_ap", report.mean_ap)
            frozen.check(f"acceptance/{method}/s_at_4", report.sensitivity_at(4.0))
            frozen.check(f"acceptance/{method}/sensitivities", list(report.sensitivities))

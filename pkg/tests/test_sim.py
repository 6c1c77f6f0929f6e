import math

import numpy as np
import pytest

from gdstbc.sim import (
    CSV_HEADER,
    SimConfig,
    bit_mapping,
    build_codebook,
    noise_var_for_snr,
    run_sim,
)


def _cfg(**kw):
    base = dict(lam=2, m=16, snr_db=(6.0,), frames=400, coherence=5, seed=11)
    base.update(kw)
    return SimConfig(**base)


class TestBitMapping:
    def test_two_bit_groups(self):
        assert bit_mapping((1, 0, 1, 0), (2, 2, 2, 2)) == [1, 0, 1, 0]

    def test_sixteen_point_groups(self):
        bits = bit_mapping((0, 0, 0, 0), (16, 16, 16, 16))
        assert bits == [0] * 16  # 16 bits over 8 uses: 2 bits per channel use

    def test_msb_first(self):
        assert bit_mapping((5,), (8,)) == [1, 0, 1]

    def test_non_power_of_two_rejected(self):
        with pytest.raises(ValueError):
            bit_mapping((0, 0, 0, 0), (6, 6, 6, 6))


class TestNoiseVar:
    def test_snr_convention(self):
        # snr_db = 10*log10(n / noise_var)
        assert noise_var_for_snr(0.0, 4) == pytest.approx(4.0)
        assert noise_var_for_snr(10.0, 4) == pytest.approx(0.4)
        assert noise_var_for_snr(math.inf, 4) == 0.0


class TestRunSim:
    def test_noiseless_has_zero_errors(self):
        res = run_sim(_cfg(snr_db=(math.inf,), frames=300, decoder="both"))
        for p in res.points:
            assert p.frame_errors == 0 and p.bler == 0.0
            assert p.bit_errors == 0 and p.ber == 0.0
            assert p.frames == 300

    def test_determinism(self):
        a = run_sim(_cfg(decoder="both"))
        b = run_sim(_cfg(decoder="both"))
        assert a.to_csv() == b.to_csv()

    def test_worker_count_does_not_change_results(self):
        a = run_sim(_cfg(frames=600))
        b = run_sim(_cfg(frames=600, workers=2))
        assert a.to_csv() == b.to_csv()

    def test_decoders_agree_frame_by_frame(self):
        res = run_sim(_cfg(snr_db=(0.0, 8.0), frames=800, decoder="both"))
        by_snr = {}
        for p in res.points:
            by_snr.setdefault(p.snr_db, []).append(p)
        for pts in by_snr.values():
            assert len(pts) == 2
            assert pts[0].frame_errors == pts[1].frame_errors
            assert pts[0].bit_errors == pts[1].bit_errors

    def test_metric_evaluation_accounting(self):
        res = run_sim(_cfg(frames=123, decoder="both"))
        for p in res.points:
            per_frame = 16 if p.decoder == "exhaustive" else 8
            assert p.metric_evals == p.frames * per_frame

    def test_whole_burst_coherence(self):
        res = run_sim(_cfg(coherence=None, frames=200))
        assert res.points[0].frames == 200

    def test_frame_count_exact_with_partial_block(self):
        # 7 frames with 4-frame blocks: 3 + 3 + 1 information frames
        res = run_sim(_cfg(frames=7, coherence=4))
        assert res.points[0].frames == 7

    def test_target_errors_stops_early_and_stays_deterministic(self):
        cfg = _cfg(snr_db=(0.0,), frames=20000, target_errors=50)
        a = run_sim(cfg)
        b = run_sim(cfg)
        assert a.to_csv() == b.to_csv()
        assert a.points[0].frame_errors >= 50
        assert a.points[0].frames < 20000

    def test_bler_only_mode_for_non_power_of_two_groups(self):
        res = run_sim(SimConfig(lam=2, m=6**4, snr_db=(10.0,), frames=50,
                                coherence=5, seed=0))
        p = res.points[0]
        assert p.bits == 0 and p.bit_errors == 0
        assert math.isnan(p.ber)
        assert 0.0 <= p.bler <= 1.0

    def test_hyperbola_family_runs(self):
        res = run_sim(SimConfig(lam=2, m=16, family="hyperbola", snr_db=(12.0,),
                                frames=200, coherence=5, seed=1))
        assert res.points[0].frames == 200

    def test_csv_shape(self):
        res = run_sim(_cfg(snr_db=(0.0, 4.0), decoder="both", frames=100))
        lines = res.to_csv().strip().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 2 * 2
        first = lines[1].split(",")
        assert first[0] == "0" and first[1] == "group"
        assert first[-1] == "11"  # seed column

    def test_json_mirrors_csv(self):
        import json

        res = run_sim(_cfg(frames=100))
        doc = json.loads(res.to_json())
        assert doc["config"]["lam"] == 2
        assert doc["config"]["seed"] == 11
        assert len(doc["results"]) == 1
        row = doc["results"][0]
        assert row["frames"] == res.points[0].frames
        assert row["metric_evals"] == res.points[0].metric_evals
        assert "snr_convention" in doc and "backend" in doc


class TestConfigValidation:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            run_sim(_cfg(snr_db=()))
        with pytest.raises(ValueError):
            run_sim(_cfg(frames=0))
        with pytest.raises(ValueError):
            run_sim(_cfg(coherence=1))
        with pytest.raises(ValueError):
            run_sim(_cfg(decoder="magic"))
        with pytest.raises(ValueError):
            run_sim(_cfg(m=15))
        with pytest.raises(ValueError):
            run_sim(_cfg(workers=0))
        with pytest.raises(ValueError):
            run_sim(_cfg(seed=-1))
        with pytest.raises(ValueError):
            run_sim(_cfg(n_r=0))
        with pytest.raises(ValueError):
            run_sim(_cfg(target_errors=0))

    def test_hyperbola_needs_lambda_two(self):
        with pytest.raises(ValueError):
            SimConfig(lam=3, m=16, family="hyperbola", snr_db=(0.0,)).validate()

    def test_preset_consistency(self):
        with pytest.raises(ValueError):
            build_codebook(SimConfig(lam=2, m=16, preset="paper-8ant-rate2",
                                     snr_db=(0.0,)))
        with pytest.raises(ValueError):
            build_codebook(SimConfig(lam=3, m=256, preset="paper-8ant-rate2",
                                     snr_db=(0.0,)))

    def test_preset_codebook_builds(self):
        cb = build_codebook(SimConfig(lam=3, m=16**4, preset="paper-8ant-rate2",
                                      snr_db=(0.0,)))
        assert cb.M == 16**4 and cb.rate_bits_per_use == pytest.approx(2.0)

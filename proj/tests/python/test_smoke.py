import pytest

import crowdc


def test_fit_btl_three_to_one():
    comparisons = [("s", 1, 2, 1)] * 3 + [("s", 1, 2, 2)]
    raw = crowdc.fit_btl(comparisons, [1, 2], normalized=False, epsilon=0.0)
    assert raw[1] == pytest.approx(0.75, abs=1e-6)
    assert raw[2] == pytest.approx(0.25, abs=1e-6)
    assert crowdc.fit_btl(comparisons, [1, 2]) == {1: 1.0, 2: 0.0}


def test_noiseless_baseline_recovers_truth():
    result = crowdc.simulate_btl(30, 1.0, 1, 4)
    assert result["unique_pairs"] == 435
    assert crowdc.kendall_tau(result["final_scores"], list(range(1, 31))) == 1.0


def test_crowdc_operating_point_cost():
    result = crowdc.simulate_crowdc(100, 0.8, 5, 1, 2, 12, partition_seed=3)
    assert result["unique_pairs"] == 2594
    assert len(result["final_scores"]) == 100
    assert crowdc.cost_formulas(100, 2, 12, 5)["crowdc_total_shared"] == 12970


def test_rank_crowdc_from_comparisons():
    comparisons = crowdc.generate_comparisons(12, 0.9, 3, 7)
    result = crowdc.rank_crowdc(comparisons, list(range(1, 13)), g=2, p=3, seed=1)
    assert sorted(result["final_scores"]) == list(range(1, 13))
    assert result["unique_pairs"] == crowdc.cost_formulas(12, 2, 3, 1)["crowdc_total_shared"]


def test_pivot_orders_and_errors():
    assert crowdc.pivot_orders(10, 4) == [1, 4, 7, 10]
    with pytest.raises(crowdc.CrowdcError):
        crowdc.pivot_orders(10, 1)
    with pytest.raises(crowdc.CrowdcError):
        crowdc.simulate_crowdc(50, 0.8, 1, 0, 20, 2)


def test_sweep_and_plots(tmp_path):
    config = tmp_path / "sweep.cfg"
    config.write_text(
        "n = 12\nt = 1\nr = 0.8\ng = 2\np = 2\n"
        "datasets_per_cell = 2\npartitions_per_dataset = 1\n"
    )
    outcome = crowdc.run_sweep(config, tmp_path / "out", seed=3, jobs=2)
    assert outcome["complete"]
    assert outcome["records_written"] == 4
    files = crowdc.emit_plots(outcome["results_file"], tmp_path / "plots")
    assert any(str(f).endswith(".svg") for f in files)

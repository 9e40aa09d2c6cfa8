import pytest

from emoc.probes import (PROBLEMS, SizeSchedule, build_probe_suite,
                         oracle_output, suite_from_json, suite_to_json)


def test_schedule_sizes_geometric():
    assert SizeSchedule(8, 2.0, 5).sizes() == (8, 16, 32, 64, 128)


def test_schedule_sizes_strictly_increasing_with_small_ratio():
    sizes = SizeSchedule(3, 1.24, 10).sizes()
    assert all(b > a for a, b in zip(sizes, sizes[1:]))


def test_schedule_validation():
    with pytest.raises(ValueError):
        SizeSchedule(0, 2.0, 5)
    with pytest.raises(ValueError):
        SizeSchedule(8, 1.0, 5)
    with pytest.raises(ValueError):
        SizeSchedule(8, 2.0, 1)


def test_suite_shape():
    suite = build_probe_suite(PROBLEMS["sort_ascending"],
                              SizeSchedule(4, 2.0, 3), seed=7)
    assert len(suite.probes) == 3 * 5  # worst, best, 3 randoms per size
    by_size = suite.by_size()
    assert sorted(by_size) == [4, 8, 16]
    tags = [p.tag for p in by_size[4]]
    assert tags == ["worst", "best", "random-0", "random-1", "random-2"]


def test_suites_regenerate_identically():
    for name, problem in PROBLEMS.items():
        a = build_probe_suite(problem, seed=42)
        b = build_probe_suite(problem, seed=42)
        assert a == b
        assert suite_to_json(a) == suite_to_json(b)


def test_seed_changes_random_cases_only():
    spec = PROBLEMS["sort_ascending"]
    sched = SizeSchedule(8, 2.0, 3)
    a = build_probe_suite(spec, sched, seed=1)
    b = build_probe_suite(spec, sched, seed=2)
    for pa, pb in zip(a.probes, b.probes):
        if pa.tag in ("worst", "best"):
            assert pa.args == pb.args
    assert a != b


def test_sort_extreme_cases():
    suite = build_probe_suite(PROBLEMS["sort_ascending"],
                              SizeSchedule(4, 2.0, 2), seed=0)
    worst = next(p for p in suite.probes if p.size == 4 and p.tag == "worst")
    best = next(p for p in suite.probes if p.size == 4 and p.tag == "best")
    assert worst.args == ([4, 3, 2, 1],)
    assert best.args == ([1, 2, 3, 4],)
    assert worst.oracle == [1, 2, 3, 4]


def test_search_cases_sorted_and_target_consistent():
    suite = build_probe_suite(PROBLEMS["search_index"],
                              SizeSchedule(8, 2.0, 3), seed=3)
    for p in suite.probes:
        vals, target = p.args
        assert all(b > a for a, b in zip(vals, vals[1:]))
        if p.tag == "worst":
            assert target not in vals and p.oracle == -1
        elif p.tag == "best":
            assert p.oracle == 0
        else:
            assert vals[p.oracle] == target


def test_prime_worst_is_largest_prime_below_power():
    suite = build_probe_suite(PROBLEMS["is_prime"],
                              SizeSchedule(8, 1.5, 2), seed=0)
    worst = next(p for p in suite.probes if p.size == 8 and p.tag == "worst")
    assert worst.args == (251,)
    assert worst.oracle is True


def test_prime_best_is_even_power():
    suite = build_probe_suite(PROBLEMS["is_prime"],
                              SizeSchedule(8, 1.5, 2), seed=0)
    best = next(p for p in suite.probes if p.size == 8 and p.tag == "best")
    assert best.args == (256,)
    assert best.oracle is False


def test_prime_randoms_have_requested_bit_length():
    suite = build_probe_suite(PROBLEMS["is_prime"],
                              SizeSchedule(5, 2.0, 3), seed=9)
    for p in suite.probes:
        if p.tag.startswith("random"):
            (v,) = p.args
            assert v.bit_length() == p.size
            assert v % 2 == 1


def test_size_below_minimum_rejected():
    with pytest.raises(ValueError):
        build_probe_suite(PROBLEMS["is_prime"], SizeSchedule(1, 2.0, 3))


def test_oracle_output_validates_arity():
    spec = PROBLEMS["search_index"]
    assert oracle_output(spec, ([2, 4, 6], 4)) == 1
    with pytest.raises(ValueError):
        oracle_output(spec, ([2, 4, 6],))


def test_search_oracle_prefers_least_index():
    assert oracle_output(PROBLEMS["search_index"], ([7, 7, 7], 7)) == 0


def test_json_round_trip():
    suite = build_probe_suite(PROBLEMS["search_index"],
                              SizeSchedule(4, 2.0, 3), seed=11)
    assert suite_from_json(suite_to_json(suite)) == suite


def test_fingerprint_distinguishes_suites():
    spec = PROBLEMS["sort_ascending"]
    a = build_probe_suite(spec, seed=0)
    b = build_probe_suite(spec, seed=1)
    c = build_probe_suite(spec, SizeSchedule(4, 2.0, 10), seed=0)
    assert len({a.fingerprint(), b.fingerprint(), c.fingerprint()}) == 3

import pytest

from diagforge.core.machines.halting import (
    DiagonalValue,
    DivergesMarker,
    decide_spec,
    diagonal_g,
    dovetail,
    halting_f,
    lba_halt_decide,
    race_diagonal,
    semi_decide_halt,
    semi_decide_spec,
    verify_divergence_certificate,
    verify_halt_certificate,
)
from diagforge.core.machines.numbering import decode_tm
from diagforge.core.machines.tm_format import parse_tm
from diagforge.core.models import (
    DeciderLimitError,
    DivergesProven,
    Halts,
    OutOfSpaceError,
    SpaceBound,
    Unknown,
)

BB2 = (
    "start: q0\nhalt: halt\n"
    "q0 _ -> q1 1 R\nq0 1 -> q1 1 L\nq1 _ -> q0 1 L\nq1 1 -> halt 1 R\n"
)
ALTERNATOR = "start: q0\nq0 _ -> q1 _ R\nq1 _ -> q0 _ L\n"
RUNAWAY = "start: q0\nq0 _ -> q0 _ R\n"
SMALL = SpaceBound(8)


def test_semi_tier_examples() -> None:
    assert semi_decide_halt(0, 4) == Halts(steps=0, output=5)
    assert semi_decide_halt(3, None, 100) == Unknown(budget=100)
    assert semi_decide_spec(parse_tm(BB2), None) == Halts(steps=6, output=4)


def test_exact_tier_proves_divergence() -> None:
    assert lba_halt_decide(3, None) == DivergesProven(cycle_start=0, cycle_length=1)
    assert decide_spec(parse_tm(ALTERNATOR), None) == DivergesProven(
        cycle_start=0, cycle_length=2
    )
    assert lba_halt_decide(0, 2) == Halts(steps=0, output=3)


def test_halting_f_tiers() -> None:
    assert halting_f(0, 0, "semi") == 1
    assert halting_f(0, 0, "exact") == 1
    assert halting_f(3, 3, "exact") == 0
    assert halting_f(3, 3, "semi", budget=50) == Unknown(budget=50)
    with pytest.raises(ValueError):
        halting_f(0, 0, "oracle")  # type: ignore[arg-type]


def test_exact_tier_leaves_the_region() -> None:
    with pytest.raises(OutOfSpaceError):
        decide_spec(parse_tm(RUNAWAY), None, SpaceBound(4))


def test_exact_tier_step_cap() -> None:
    with pytest.raises(DeciderLimitError) as exc:
        decide_spec(parse_tm(ALTERNATOR), None, max_steps=1)
    assert exc.value.limit == 1


def test_semi_and_exact_tiers_agree() -> None:
    compared = 0
    for x in range(300):
        semi = semi_decide_halt(x, x, 10_000)
        try:
            exact = lba_halt_decide(x, x, SpaceBound(16))
        except OutOfSpaceError:
            continue
        if isinstance(semi, Halts):
            assert exact == semi
        if isinstance(exact, DivergesProven):
            assert isinstance(semi, Unknown)
        compared += 1
    assert compared > 0


def test_certificates_verify() -> None:
    bb2 = parse_tm(BB2)
    assert verify_halt_certificate(bb2, None, Halts(steps=6, output=4))
    assert not verify_halt_certificate(bb2, None, Halts(steps=5, output=4))
    assert not verify_halt_certificate(bb2, None, Halts(steps=6, output=3))

    alternator = parse_tm(ALTERNATOR)
    proof = decide_spec(alternator, None, SMALL)
    assert isinstance(proof, DivergesProven)
    assert verify_divergence_certificate(alternator, None, SMALL, proof)
    assert not verify_divergence_certificate(
        alternator, None, SMALL, DivergesProven(cycle_start=0, cycle_length=3)
    )
    assert not verify_divergence_certificate(
        alternator, None, SMALL, DivergesProven(cycle_start=0, cycle_length=0)
    )


def test_every_exact_answer_carries_a_checkable_certificate() -> None:
    for x in range(200):
        spec = decode_tm(x)
        try:
            answer = decide_spec(spec, x, SMALL)
        except OutOfSpaceError:
            continue
        if isinstance(answer, Halts):
            assert verify_halt_certificate(spec, x, answer)
        else:
            assert verify_divergence_certificate(spec, x, SMALL, answer)


@pytest.mark.slow
def test_exact_tier_certificates_on_every_pair() -> None:
    decided = 0
    for x in range(500):
        spec = decode_tm(x)
        for y in range(500):
            try:
                answer = decide_spec(spec, y, SMALL)
            except OutOfSpaceError:
                continue
            if isinstance(answer, Halts):
                assert verify_halt_certificate(spec, y, answer)
            else:
                assert verify_divergence_certificate(spec, y, SMALL, answer)
            decided += 1
    assert decided > 0


def test_diagonal_g_examples() -> None:
    assert diagonal_g(3, SMALL) == DiagonalValue(
        value=0, certificate=DivergesProven(cycle_start=0, cycle_length=1)
    )
    assert diagonal_g(0, SMALL) == DivergesMarker(certificate=Halts(steps=0, output=1))


def test_diagonal_g_differs_from_every_machine_on_its_index() -> None:
    defined = 0
    for x in range(64):
        try:
            g = diagonal_g(x, SMALL)
        except OutOfSpaceError:
            continue
        machine = semi_decide_halt(x, x, 10_000)
        if isinstance(g, DiagonalValue):
            # g is defined exactly where machine x diverges on x
            assert isinstance(machine, Unknown)
            defined += 1
        else:
            assert isinstance(machine, Halts)
    assert defined > 0


@pytest.mark.slow
def test_diagonal_g_is_defined_exactly_where_the_machine_diverges() -> None:
    for x in range(1000):
        try:
            g = diagonal_g(x, SMALL)
        except OutOfSpaceError:
            continue
        answer = lba_halt_decide(x, x, SMALL)
        if isinstance(answer, DivergesProven):
            assert g == DiagonalValue(value=0, certificate=answer)
            assert verify_divergence_certificate(decode_tm(x), x, SMALL, answer)
        else:
            assert g == DivergesMarker(certificate=answer)
            assert semi_decide_halt(x, x, answer.steps) == answer


def test_dovetail_yields_in_halting_order() -> None:
    jobs = {
        "bb": (parse_tm(BB2), None),
        "loop": (decode_tm(3), None),
        "zero": (decode_tm(0), 4),
    }
    assert list(dovetail(jobs, 50)) == [
        ("zero", Halts(steps=0, output=5)),
        ("bb", Halts(steps=6, output=4)),
    ]
    assert list(dovetail({"loop": (decode_tm(3), None)}, 10)) == []


def test_race_reports_which_side_converged() -> None:
    report = race_diagonal(3, SMALL, 100)
    assert report.converged == "g"
    assert report.rounds == 1
    assert isinstance(report.machine, Unknown)
    assert report.machine.budget == 1
    assert report.g == DiagonalValue(
        value=0, certificate=DivergesProven(cycle_start=0, cycle_length=1)
    )
    assert not report.both_converged

    report = race_diagonal(0, SMALL, 100)
    assert report.converged == "machine"
    assert report.rounds == 0
    assert report.machine == Halts(steps=0, output=1)
    assert isinstance(report.g, DivergesMarker)

    starved = race_diagonal(3, SMALL, 0)
    assert starved.converged == "g"
    assert isinstance(starved.machine, Unknown)
    assert starved.machine.budget == 0

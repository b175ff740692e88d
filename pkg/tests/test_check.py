import pytest

from most.check import CheckError, check_declaration, check_program
from most.denote import denote
from most.trace import erase_set, format_trace

from helpers import decl, find, load, traces


def test_relay_derivation():
    d = decl("ex62.most", "relay")
    res = check_declaration(d)
    assert res.traces == traces(d, "I close a ; O close c")
    root = res.derivation
    assert root.rule == "New"
    [par] = find(root, "Par")
    assert {format_trace(t) for t in par.traces} == {"I close a ; S close b ; O close c"}
    left, right = par.children
    (l1,) = find(left, "RTu-R")
    (r1,) = find(right, "RTu-R")
    (r2,) = find(right, "Red-RTu")
    fmt = lambda n: {format_trace(t) for t in n.traces}
    assert fmt(l1) == {"O close b"}
    assert fmt(left) == {"I close a ; O close b"}
    assert fmt(r1) == {"O close c"}
    assert fmt(r2) == {"C close a ; O close c"}
    assert fmt(right) == {"I close b ; C close a ; O close c"}


def test_incompatible_composition_witnesses():
    d = decl("ex61.most", "PQ")
    with pytest.raises(CheckError) as e:
        check_declaration(d)
    assert e.value.kind == "ConstraintIncompatible"
    w1, w2 = (format_trace(t) for t in e.value.witnesses)
    assert w1 == "I a.1 ; O b.0 ; I close a ; O close b"
    assert w2.startswith("I b.0 ; C a.0 ; O c.0")


def test_id_and_label_swap():
    assert check_declaration(decl("id.most", "id")).traces
    with pytest.raises(CheckError) as e:
        check_declaration(decl("id.most", "idSwap"))
    assert e.value.kind == "LabelNotPermitted"


def test_auctions():
    res = check_program(load("auction.most"))
    assert not isinstance(res["Auctioneer"], CheckError)
    assert not isinstance(res["BidsZero"], CheckError)
    assert isinstance(res["UnfairAuctioneer"], CheckError)
    assert res["UnfairAuctioneer"].kind == "LabelNotPermitted"


def test_bids_zero_reports_dead_branches():
    res = check_declaration(decl("auction.most", "BidsZero"))
    assert {l for _, _, l in res.dead_branches} == {"win"}


def test_strict_rejects_bids_zero():
    with pytest.raises(CheckError) as e:
        check_declaration(decl("auction.most", "BidsZero"), strict=True)
    assert e.value.kind == "UncoveredBehaviour"


@pytest.mark.parametrize("file", ["doubleneg_spec1.most", "doubleneg_spec2.most"])
def test_double_negation_accepted(file):
    res = check_program(load(file))
    for name in ("neg", "doubleNeg", "doubleNegHidden"):
        assert not isinstance(res[name], CheckError), name


def test_relay_matches_denotation():
    d = decl("ex62.most", "relay")
    assert erase_set(check_declaration(d).traces) == denote(d.body)


def test_error_reports_judgment():
    with pytest.raises(CheckError) as e:
        check_declaration(decl("id.most", "idSwap"))
    j = e.value.to_json()
    assert j["rule"] and j["judgment"] and j["position"]

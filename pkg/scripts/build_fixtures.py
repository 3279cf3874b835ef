"""Regenerate the shipped derivation fixtures under src/inqml/data/derivations."""
from pathlib import Path

from inqml.formula import Atom, Conj, Impl, InqDisj, Yields, parse, print_formula
from inqml.proofsys import (CN, Ax, combine_yields_derivation, distribution_proof, imp_refl,
                            linearize, modal_pair)

OUT = Path(__file__).resolve().parents[1] / "src" / "inqml" / "data" / "derivations"


def write(name, derivation, premises=()):
    (OUT / f"{name}.json").write_text(derivation.dumps(), encoding="utf-8")
    if premises:
        text = "".join(print_formula(p, resugar=True) + "\n" for p in premises)
        (OUT / f"{name}.premises").write_text(text, encoding="utf-8")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    p, q, r = Atom("p"), Atom("q"), Atom("r")
    p1, p2, q1, q2 = Atom("p1"), Atom("p2"), Atom("q1"), Atom("q2")
    write("combine_yields", combine_yields_derivation(p1, p2, r, q1, q2),
          [parse("p1 & r => q1"), parse("p2 => q2 // r")])
    write("identity", linearize([imp_refl(p)]))
    write("question_identity", linearize([imp_refl(parse("?p"))]))
    write("distribution", linearize([distribution_proof(p, q, r)]))
    pq = Conj(p, q)
    left = CN(Ax("AndE1", Impl(pq, p)))
    right = CN(Ax("AndE2", Impl(pq, q)))
    write("cn_projections", linearize([left, right]))
    inj = CN(Ax("OrI1", Impl(p, InqDisj(p, r))))
    write("cn_injection", linearize([inj]))
    write("trans_chain", linearize([modal_pair("Trans", left, inj, Yields(pq, InqDisj(p, r)))]))
    both = modal_pair("RConj", left, right, Yields(pq, pq))
    write("rconj_projections", linearize([both]))


if __name__ == "__main__":
    main()

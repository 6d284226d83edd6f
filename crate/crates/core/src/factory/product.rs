//! Componentwise products of models.
//!
//! Every law except the cascaded-output axiom is an equation or a
//! componentwise order condition, so the product of two models that pass
//! under some options passes under the same options. Carrier sizes
//! multiply, which gives larger models than the catalogues reach.

use crate::algebra::{BinOpTable, Carrier, CkaStructure, Elem, StructureError, UnaryOpTable};
use crate::model::C2kaModel;
use crate::stimulus::StimulusStructure;

fn pair_carrier(left: &Carrier, right: &Carrier) -> Result<Carrier, StructureError> {
    let mut names = Vec::with_capacity(left.len() * right.len());
    for x in left.names() {
        for y in right.names() {
            names.push(format!("{x}_{y}"));
        }
    }
    Carrier::new(names)
}

fn pair_binop(l: &BinOpTable, r: &BinOpTable, lc: usize, rc: usize) -> BinOpTable {
    let (lr, rr) = (l.rows(), r.rows());
    let (lcol, rcol) = (l.cols(), r.cols());
    BinOpTable::rect_from_fn(lr * rr, lcol * rcol, lc * rc, |a, b| {
        let v = l.get(Elem(a.0 / rr), Elem(b.0 / rcol));
        let w = r.get(Elem(a.0 % rr), Elem(b.0 % rcol));
        Elem(v.0 * rc + w.0)
    })
}

fn pair_unop(l: &UnaryOpTable, r: &UnaryOpTable) -> UnaryOpTable {
    let rn = r.len();
    UnaryOpTable::from_fn(l.len() * rn, |a| {
        Elem(l.get(Elem(a.0 / rn)).0 * rn + r.get(Elem(a.0 % rn)).0)
    })
}

fn pair_elem(x: Elem, y: Elem, right_len: usize) -> Elem {
    Elem(x.0 * right_len + y.0)
}

/// The product of two models. Element `(x, y)` is named `x_y` and sits at
/// index `x * |right| + y`.
pub fn product_model(left: &C2kaModel, right: &C2kaModel) -> Result<C2kaModel, StructureError> {
    let (lk, rk) = (&left.cka, &right.cka);
    let (ls, rs) = (&left.stim, &right.stim);
    let (nlk, nrk) = (lk.carrier.len(), rk.carrier.len());
    let (nls, nrs) = (ls.len(), rs.len());
    let cka = CkaStructure {
        carrier: pair_carrier(&lk.carrier, &rk.carrier)?,
        plus: pair_binop(&lk.plus, &rk.plus, nlk, nrk),
        seq: pair_binop(&lk.seq, &rk.seq, nlk, nrk),
        par: pair_binop(&lk.par, &rk.par, nlk, nrk),
        seq_star: pair_unop(&lk.seq_star, &rk.seq_star),
        par_star: pair_unop(&lk.par_star, &rk.par_star),
        zero: pair_elem(lk.zero, rk.zero, nrk),
        one: pair_elem(lk.one, rk.one, nrk),
    };
    let stim = StimulusStructure {
        carrier: pair_carrier(&ls.carrier, &rs.carrier)?,
        oplus: pair_binop(&ls.oplus, &rs.oplus, nls, nrs),
        odot: pair_binop(&ls.odot, &rs.odot, nls, nrs),
        deactivation: pair_elem(ls.deactivation, rs.deactivation, nrs),
        neutral: pair_elem(ls.neutral, rs.neutral, nrs),
    };
    Ok(C2kaModel {
        cka,
        stim,
        act: pair_binop(&left.act, &right.act, nlk, nrk),
        out: pair_binop(&left.out, &right.out, nls, nrs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CheckOptions;
    use crate::factory::oracle::oracle_laws_hold;
    use crate::factory::{family_lattice_models, fixture_stim4};

    #[test]
    fn product_of_certified_models_is_certified() {
        let opts = CheckOptions::relaxed();
        let stim4 = fixture_stim4().document.model;
        let small = family_lattice_models(2, 2, &CheckOptions::default()).remove(0);
        let p = product_model(&stim4, &small).unwrap();
        assert_eq!((p.stim.len(), p.cka.carrier.len()), (8, 8));
        assert!(p.check_all(&opts).unwrap().passed());
        assert!(oracle_laws_hold(&p, false));
        assert_eq!(p.cka.name(p.cka.one), "1_1");
    }

    #[test]
    fn only_the_cascaded_output_axiom_is_lost() {
        let small = family_lattice_models(2, 2, &CheckOptions::default()).remove(0);
        let p = product_model(&small, &small).unwrap();
        let strict = p.check_all(&CheckOptions::default()).unwrap();
        assert_eq!(strict.violations.len(), 1);
        assert!(strict.violated(crate::model::CASCADED_OUTPUT));
        assert!(p.check_all(&CheckOptions::relaxed()).unwrap().passed());
    }
}

// scratch probe (deleted before release): prints renders the scenario layer freezes
use qpb_core::bundle::*;
use qpb_core::conn::*;
use qpb_core::focalc::InvForm1;
use qpb_core::grext::Mode;
use qpb_core::hopf::HopfElem;
use qpb_core::scalar::{parse_scalar, Scalar};

#[test]
fn probe() {
    // 4D+ family
    let ctx = homogeneous_bundle("4d+", Mode::Exterior, 2).unwrap();
    let Rep::V(alg) = &ctx.rep else { panic!() };
    println!("4d+ ext names(1) = {:?}", alg.tab.q.names(1));
    println!("4d+ ext names(2) = {:?}", alg.tab.q.names(2));
    let s4 = parse_scalar("(1-mu^3)/(1+mu)").unwrap();
    let mut coords = vec![Scalar::zero(); 4];
    coords[0] = Scalar::t();
    coords[2] = Scalar::one().add(&Scalar::t().mul(&s4));
    let conn = homog_connection(&ctx, "family", &[InvForm1(coords)]).unwrap();
    let r = curvature(&ctx, &conn, BracketKind::Preimage).unwrap();
    println!("4d+ R_t = {}", ctx.rep.render(&r[0]));
    let r2 = curvature(&ctx, &conn, BracketKind::IotaD).unwrap();
    println!("4d+ R_t iota-d = {}", ctx.rep.render(&r2[0]));
    let md = multiplicativity_defects(&ctx, &conn).unwrap();
    for (w, v) in &md.defects {
        println!("4d+ mult defect [{}] = {}", w, ctx.rep.render(v));
    }
    let locus = multiplicativity_locus(&md);
    println!("4d+ mult locus = {:?}", locus.as_ref().map(|s| s.to_string()));
    let t0 = parse_scalar("-(1+mu)/(1-mu^3)").unwrap();
    for (w, v) in &md.defects {
        let at0 = el_subst_t(v, &t0).unwrap();
        println!("4d+ mult defect [{}] at t0 is_zero = {}", w, at0.is_zero());
        for c in el_scalars(v) {
            let num = c
                .eval(
                    Some(qpb_core::scalar::q_ratio(1, 2)),
                    None,
                    Some(qpb_core::scalar::q_ratio(-12, 7)),
                )
                .unwrap();
            println!("  defect coeff at mu=1/2, t=-12/7: {:?}", num.is_zero());
        }
    }
    // factored target formulas
    let idx_emep = alg.tab.q.names(2).iter().position(|n| n == "em*ep").unwrap();
    let mk = |coef: &str| {
        let mut v = alg.zero(2);
        v.comps[idx_emep] = HopfElem::one().scale(&parse_scalar(coef).unwrap());
        El::V(v)
    };
    let tgt_iotad = mk("(1+mu^2)*(1+t*(1-mu^3)/(1+mu))");
    let tgt_pre = mk("((1+mu^2)*(1-mu+mu^2)/mu)*(1+t*(1-mu^3)/(1+mu))");
    println!("R_t iotad matches factored form: {}", r2[0] == tgt_iotad);
    println!("R_t preimage matches factored form: {}", r[0] == tgt_pre);
    let rd = regularity_defects(&ctx, &conn).unwrap();
    println!("4d+ reg tested = {:?}", rd.tested);
    for (w, v) in &rd.defects {
        println!("4d+ reg defect [{}] = {}", w, ctx.rep.render(v));
    }
    let mut vals = Vec::new();
    for (_, el) in &rd.defects {
        vals.extend(el_scalars(el));
    }
    println!("4d+ reg locus = {:?}", qpb_core::scalar::t_common_root(&vals).map(|s| s.to_string()));
    // dη, dξ
    let deta = ctx.rep.d(&ctx.rep.from_inv1(&InvForm1::basis(4, 2))).unwrap();
    println!("4d+ d(eta) = {}", ctx.rep.render(&deta));

    // 3D regularity + h-route
    let ctx3 = homogeneous_bundle("3d", Mode::Envelope, 3).unwrap();
    let conn3 = canonical_connection(&ctx3);
    let rd3 = regularity_defects(&ctx3, &conn3).unwrap();
    println!("3d reg tested = {:?}", rd3.tested);
    for (w, v) in &rd3.defects {
        println!("3d reg defect [{}] = {}", w, ctx3.rep.render(v));
    }
    let md3 = multiplicativity_defects(&ctx3, &conn3).unwrap();
    println!("3d mult defect count = {}", md3.defects.len());
    let dom = ctx3.rep.d(&conn3.omega[0]).unwrap();
    let h = h_omega(&ctx3, &conn3, &dom).unwrap();
    println!("3d h(d omega) = {}", ctx3.rep.render(&h));
    let r3 = curvature(&ctx3, &conn3, BracketKind::Preimage).unwrap();
    println!("3d R = {}, equal = {}", ctx3.rep.render(&r3[0]), h == r3[0]);

    // classical
    let ctxc = vertical_bundle(2).unwrap();
    let connc = canonical_connection(&ctxc);
    let tau = &connc.omega[0];
    let t2 = ctxc.rep.mul(tau, tau).unwrap();
    println!("classical tau^2 = {}", ctxc.rep.render(&t2));
    let dt = ctxc.rep.d(tau).unwrap();
    println!("classical d tau = {}", ctxc.rep.render(&dt));
    let a = ctxc.rep.from_coeff(&HopfElem::gen(0));
    let lr = ctxc.rep.mul(tau, &a).unwrap().sub(&ctxc.rep.mul(&a, tau).unwrap());
    println!("classical [tau, alpha] = {}", ctxc.rep.render(&lr));
    let rdc = regularity_defects(&ctxc, &connc).unwrap();
    println!("classical reg defects = {}", rdc.defects.len());

    // line bundle commutation
    let ctxl = line_bundle(&Scalar::lambda(), 2).unwrap();
    let connl = canonical_connection(&ctxl);
    for k in 1..=3usize {
        let zk = ctxl.rep.from_coeff(&HopfElem::word(vec![0u8; k]));
        let lhs = ctxl.rep.mul(&connl.omega[0], &zk).unwrap();
        let rhs = ctxl
            .rep
            .mul(&zk, &connl.omega[0])
            .unwrap()
            .scale(&Scalar::lambda().pow(k as i32).unwrap());
        println!("line k={} commutation match = {}", k, lhs == rhs);
    }
    // tensor-mode negative control
    let ctxt = line_bundle_mode(&Scalar::lambda(), Mode::Tensor, 2).unwrap();
    let connt = canonical_connection(&ctxt);
    let os = ctxt.rep.mul(&connt.omega[0], &connt.omega[0]).unwrap();
    println!("line tensor omega^2 = {}", ctxt.rep.render(&os));
    let mdt = multiplicativity_defects(&ctxt, &connt).unwrap();
    for (w, v) in &mdt.defects {
        println!("line tensor mult defect [{}] = {}", w, ctxt.rep.render(v));
    }
    let mdl = multiplicativity_defects(&ctxl, &connl).unwrap();
    println!("line env mult defects = {}", mdl.defects.len());
    println!("line ideal rendered = {:?}", ctxl.gcalc.ideal.iter().map(|e| ctxl.group.render_elem(e)).collect::<Vec<_>>());

    // weil on 3d
    let w3 = weil_eval(&ctx3, &conn3, 1, BracketKind::Preimage).unwrap();
    println!(
        "3d weil k=1: in_base={} closed={} invariant={}",
        w3.in_base, w3.closed, w3.invariant_input
    );
}

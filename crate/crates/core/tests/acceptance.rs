//! Acceptance gate: one line per criterion, non-zero exit on any failure.
//!
//! Every check returns its evidence as JSON. The whole suite runs twice, on
//! pools of different sizes, and criterion 13 compares the two transcripts
//! byte for byte.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use hyperovals::graph::{automorphism_group, canonical_form, collinearity_graph, local_graph, rook_graph, six_clique_census, srg_check, SrgParams};
use hyperovals::hyperoval::{dual_hyperoval_check, prop3_check, skew_geometry_for, verify_hyperoval, HyperbolicForms};
use hyperovals::lineset::LineSet;
use hyperovals::projgeom::GeometryTables;
use hyperovals::quadric::{LineClass, PlaneSection, QForm, Quadric};
use hyperovals::search::{enumerate_hyperovals, pencil_pair_of, SearchConfig, SeedMode};
use hyperovals::spread::SpreadConstruction;

/// Wall-clock ceilings per criterion; counts are compared exactly.
const LIMITS: [Duration; 12] = [
    Duration::from_secs(1),
    Duration::from_secs(1),
    Duration::from_secs(1),
    Duration::from_secs(5),
    Duration::from_secs(3),
    Duration::from_secs(10),
    Duration::from_secs(30),
    Duration::from_secs(30),
    Duration::from_secs(300),
    Duration::from_secs(1800),
    Duration::from_secs(120),
    Duration::from_secs(600),
];

const SEARCH_BUDGET: u64 = 10_000_000;
const PGL4_4: u128 = 987_033_600;
const ROOK: SrgParams = SrgParams { v: 25, k: 8, lambda: 3, mu: 2 };

type Check = Result<Value, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn eq<T: PartialEq + std::fmt::Debug>(name: &str, got: T, want: T) -> Result<(), String> {
    ensure(got == want, || format!("{name}: got {got:?}, want {want:?}"))
}

struct Ctx {
    t: GeometryTables,
    o72: LineSet,
    sc: SpreadConstruction,
}

impl Ctx {
    fn new() -> Result<Self, String> {
        let t = GeometryTables::build(4).map_err(|e| e.to_string())?;
        let o72 = Quadric::new(&t, QForm::standard_hyperbolic()).external_lines().map_err(|e| e.to_string())?;
        let sc = SpreadConstruction::new(&t).map_err(|e| e.to_string())?;
        Ok(Ctx { t, o72, sc })
    }

    fn o96(&self, i: usize) -> Result<LineSet, String> {
        self.sc.build_96(i).map_err(|e| e.to_string())
    }
}

fn c1_geometry(c: &Ctx) -> Check {
    let t = &c.t;
    eq("points", t.num_points(), 85)?;
    eq("lines", t.num_lines(), 357)?;
    eq("planes", t.num_planes(), 85)?;
    eq("pencils", t.num_pencils(), 1785)?;
    let pencil_sizes: Vec<usize> = (0..1785).map(|p| t.pencil_lines_at(p).len()).collect();
    ensure(pencil_sizes.iter().all(|&k| k == 5), || "a pencil without 5 lines".into())?;
    ensure((0..357).all(|l| t.line_pencils(l).len() == 25), || "a line outside 25 pencils".into())?;
    Ok(json!({"points": 85, "lines": 357, "planes": 85, "pencils": 1785, "table_hash": t.table_hash()}))
}

fn c2_quadric(c: &Ctx) -> Check {
    let t = &c.t;
    let h = Quadric::new(t, QForm::standard_hyperbolic());
    eq("points", h.zeros().count_ones(..), 25)?;
    let contained = h.lines_of_class(LineClass::Contained);
    eq("contained lines", contained.len(), 10)?;
    let reguli = h.reguli().map_err(|e| e.to_string())?;
    eq("regulus sizes", [reguli[0].len(), reguli[1].len()], [5, 5])?;
    for r in &reguli {
        let mut covered: Vec<u32> = r.iter().flat_map(|&l| t.line_points(l).to_vec()).collect();
        covered.sort_unstable();
        covered.dedup();
        eq("points covered by a regulus", covered.len(), 25)?;
    }
    let (mut pairs, mut conics) = (0, 0);
    for pl in 0..85u32 {
        match h.plane_section(pl).map_err(|e| e.to_string())? {
            PlaneSection::LinePair(p) => {
                eq("line-pair section size", p.len(), 9)?;
                pairs += 1;
            }
            PlaneSection::Conic(_) => {
                let ext = t.plane_lines(pl).iter().filter(|&&l| c.o72.contains(l)).count();
                eq("external lines in a conic plane", ext, 6)?;
                conics += 1;
            }
        }
    }
    eq("line-pair planes", pairs, 25)?;
    eq("conic planes", conics, 60)?;
    eq("external lines", c.o72.len(), 72)?;
    eq("60·6/5", 60 * 6 / 5, c.o72.len())?;
    for p in 0..85u32 {
        if !h.contains_point(p) {
            let k = t.point_lines(p).iter().filter(|&&l| c.o72.contains(l)).count();
            eq("external lines through an off-quadric point", k, 6)?;
        }
    }
    Ok(json!({"points": 25, "contained": 10, "line_pair_planes": pairs, "conic_planes": conics, "external": 72, "census": h.line_census()}))
}

fn c3_prop1(c: &Ctx) -> Check {
    verify_hyperoval(&c.t, &c.o72).map_err(|v| v.to_string())?;
    Ok(json!({"size": c.o72.len(), "lines": c.o72.lines()}))
}

fn c4_spread(c: &Ctx) -> Check {
    let t = &c.t;
    let sp = &c.sc.spread;
    eq("spread lines", sp.lines.len(), 17)?;
    let mut covered: Vec<u32> = sp.lines.iter().flat_map(|&l| t.line_points(l).to_vec()).collect();
    covered.sort_unstable();
    covered.dedup();
    eq("covered points", covered.len(), 85)?;
    for pl in 0..85u32 {
        let k = sp.lines.iter().filter(|&&l| t.line_in_plane(l, pl)).count();
        eq("spread lines in a plane", k, 1)?;
    }
    let part = &c.sc.partition;
    let sizes = [part.spread_rest.len(), part.s_perp.len(), part.rest.len()];
    eq("partition", sizes, [16, 101, 240])?;
    eq("|G*|", c.sc.group.order(), 400)?;
    let orbit_sizes: Vec<usize> = c.sc.orbits.iter().map(LineSet::len).collect();
    eq("orbits on A", orbit_sizes.clone(), vec![80, 80, 80])?;
    Ok(json!({"spread": sp.lines, "s": sp.s, "partition": sizes, "group_order": 400, "orbits": c.sc.orbits.iter().map(|o| o.lines()).collect::<Vec<_>>()}))
}

fn c5_prop2(c: &Ctx) -> Check {
    let mut out = Vec::new();
    for i in 1..=3 {
        let set = c.o96(i)?;
        eq("size", set.len(), 96)?;
        verify_hyperoval(&c.t, &set).map_err(|v| format!("S ∪ A{i}: {v}"))?;
        out.push(set.lines().to_vec());
    }
    Ok(json!({"sets": out}))
}

fn c6_dual_hyperovals(c: &Ctx) -> Check {
    let t = &c.t;
    let mut planes = Vec::new();
    for pl in 0..85u32 {
        if t.line_in_plane(c.sc.spread.s, pl) {
            continue;
        }
        let lines = c.sc.dual_hyperoval_lines(t, pl, 1).map_err(|e| e.to_string())?;
        ensure(dual_hyperoval_check(t, pl, &lines).map_err(|e| e.to_string())?, || format!("plane {pl} fails"))?;
        eq("plane stabilizer order", c.sc.group.plane_stabilizer(t, pl).len(), 5)?;
        planes.push(json!([pl, lines]));
    }
    eq("planes checked", planes.len(), 80)?;
    Ok(json!({"planes": planes}))
}

fn c7_local_grid(c: &Ctx) -> Check {
    let rook = canonical_form(&rook_graph(5).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?.graph6;
    let mut out = BTreeMap::new();
    for (name, set) in [("72", c.o72.clone()), ("96", c.o96(1)?)] {
        let g = collinearity_graph(&c.t, &set);
        eq("degree", g.regular_degree(), Some(25))?;
        ensure(g.is_connected(), || format!("{name}-graph is disconnected"))?;
        for v in 0..g.n() {
            let local = local_graph(&g, v).map_err(|e| e.to_string())?;
            eq("local parameters", srg_check(&local), Some(ROOK))?;
            let cf = canonical_form(&local).map_err(|e| e.to_string())?;
            ensure(cf.graph6 == rook, || format!("{name}-graph vertex {v}: local graph is not the rook graph"))?;
        }
        out.insert(name, g.n());
    }
    Ok(json!({"vertices": out, "rook_graph6": rook}))
}

fn c8_cliques(c: &Ctx) -> Check {
    let mut out = BTreeMap::new();
    for (name, set, want) in [("72", c.o72.clone(), 60), ("96", c.o96(1)?, 80)] {
        let census = six_clique_census(&c.t, &collinearity_graph(&c.t, &set)).map_err(|e| e.to_string())?;
        eq("clique counts", census.counts(), (want, want))?;
        eq("other maximal cliques", census.other_maximal, 0)?;
        out.insert(name, census.counts());
    }
    Ok(json!(out))
}

fn c9_aut(c: &Ctx) -> Check {
    let g = collinearity_graph(&c.t, &c.o96(1)?);
    let aut = automorphism_group(&g).map_err(|e| e.to_string())?;
    eq("|Aut|", aut.order, 8 * c.sc.group.order() as u128)?;
    eq("|Aut|", aut.order, 3200)?;
    Ok(json!({"order": aut.order.to_string(), "orbit_sizes": aut.orbits.iter().map(Vec::len).collect::<Vec<_>>()}))
}

fn c10_prop3(c: &Ctx) -> Check {
    let forms = HyperbolicForms::scan(&c.t).map_err(|e| e.to_string())?;
    eq("hyperbolic quadrics", forms.len() as u128, PGL4_4 / 7200)?;
    let set = c.o96(1)?;
    let mut witnesses = Vec::new();
    for l in set.iter() {
        let w = prop3_check(&c.t, &forms, &set, l).map_err(|e| e.to_string())?.ok_or_else(|| format!("no quadric for line {l}"))?;
        witnesses.push(json!([l, w.scan_index]));
    }
    Ok(json!({"quadrics": forms.len(), "witnesses": witnesses}))
}

fn c11_generalize(_: &Ctx) -> Check {
    let s = skew_geometry_for(8, false).map_err(|e| e.to_string())?;
    eq("lines", s.lines.len(), 1568)?;
    eq("support", s.histogram.keys().copied().collect::<Vec<_>>(), vec![0, 4])?;
    Ok(json!({"lines": s.lines.len(), "histogram": s.histogram}))
}

fn c12_search(c: &Ctx) -> Check {
    let t = &c.t;
    let first = c.o72.lines()[0];
    let cfg72 = SearchConfig {
        node_budget: SEARCH_BUDGET,
        min_size: 72,
        max_size: 72,
        seed: SeedMode::FirstLine(first),
        max_found: Some(1),
        ..Default::default()
    };
    let r72 = enumerate_hyperovals(t, &cfg72).map_err(|e| e.to_string())?;
    let found72 = r72.found.first().ok_or("no 72-line hyperoval within budget")?;
    verify_hyperoval(t, found72).map_err(|v| v.to_string())?;
    let forms = HyperbolicForms::scan(t).map_err(|e| e.to_string())?;
    let quadric = forms.find_external_set(t, found72).ok_or("found set is not skew to a hyperbolic quadric")?;

    let o96 = c.o96(1)?;
    let (a, b) = pencil_pair_of(t, &o96).ok_or("no meeting pair")?;
    let cfg96 = SearchConfig {
        node_budget: SEARCH_BUDGET,
        min_size: 96,
        max_size: 96,
        seed: SeedMode::PencilPair(a, b),
        max_found: Some(1),
        ..Default::default()
    };
    let r96 = enumerate_hyperovals(t, &cfg96).map_err(|e| e.to_string())?;
    let found96 = r96.found.first().ok_or("no 96-line hyperoval within budget")?;
    verify_hyperoval(t, found96).map_err(|v| v.to_string())?;
    Ok(json!({
        "first_line": {"nodes": r72.nodes, "found": found72.lines(), "quadric": forms.forms()[quadric]},
        "pencil_pair": {"seed": [a, b], "nodes": r96.nodes, "found": found96.lines()},
    }))
}

type Criterion = (&'static str, fn(&Ctx) -> Check);

const CRITERIA: [Criterion; 12] = [
    ("geometry counts", c1_geometry),
    ("quadric census", c2_quadric),
    ("72 skew lines form a hyperoval", c3_prop1),
    ("spread pipeline", c4_spread),
    ("S ∪ A_i are hyperovals", c5_prop2),
    ("dual hyperovals and plane stabilizers", c6_dual_hyperovals),
    ("locally 5×5 grid", c7_local_grid),
    ("six-clique classes", c8_cliques),
    ("automorphism group of the 96-graph", c9_aut),
    ("local quadric for every line", c10_prop3),
    ("generalization to q = 8", c11_generalize),
    ("search rediscovery", c12_search),
];

fn transcript(ctx: &Ctx) -> Vec<(Check, Duration)> {
    CRITERIA
        .iter()
        .map(|(_, f)| {
            let start = Instant::now();
            let r = f(ctx);
            (r, start.elapsed())
        })
        .collect()
}

fn main() -> ExitCode {
    let ctx = match Ctx::new() {
        Ok(c) => c,
        Err(e) => {
            println!("setup FAIL: {e}");
            return ExitCode::FAILURE;
        }
    };
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool");
    let first = pool(1).install(|| transcript(&ctx));
    let second = pool(4).install(|| transcript(&ctx));

    let mut failures = 0;
    for (i, ((name, _), (result, took))) in CRITERIA.iter().zip(&first).enumerate() {
        let status = match result {
            Ok(_) if *took > LIMITS[i] => Err(format!("took {took:.2?}, limit {:?}", LIMITS[i])),
            Ok(_) => Ok(()),
            Err(e) => Err(e.clone()),
        };
        match status {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({took:.2?})", i + 1),
            Err(e) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {e}", i + 1);
            }
        }
    }
    let bytes = |ts: &[(Check, Duration)]| -> Vec<String> {
        ts.iter().map(|(r, _)| serde_json::to_string(&r.clone().unwrap_or_else(Value::String)).expect("json")).collect()
    };
    let (a, b) = (bytes(&first), bytes(&second));
    match a.iter().zip(&b).position(|(x, y)| x != y) {
        None => println!("criterion 13 PASS  byte-identical outputs for 1 and 4 threads ({} bytes)", a.iter().map(String::len).sum::<usize>()),
        Some(i) => {
            failures += 1;
            println!("criterion 13 FAIL  criterion {} output differs between thread counts", i + 1);
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

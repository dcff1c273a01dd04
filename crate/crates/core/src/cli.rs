//! Subcommand dispatch and deterministic reports for the `bornolab` binary.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::basis_map::BasisMap;
use crate::ideal::is_icd_at_top;
use crate::lattice::{build_lattice, CompleteLattice};
use crate::laws::{self, Check};
use crate::lift::check_requirements;
use crate::space::{is_bounded, BornSpace};
use crate::system::{
    embed_space, is_system_morphism, loc, loc_morphism, morphisms_into_embedding, spatialize, validate_system,
    verify_universal_property, BasisObject, ObjectMap, UNIQUENESS_BOUND,
};
use crate::text::ast::Item;
use crate::text::{ideal_text, lattice_spec, parse_files, parse_items, LoadError, TextError, Workspace};
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Validate every declared lattice.
    CheckLattice,
    /// Validate every declared space.
    CheckSpace,
    /// Validate every declared system and morphism.
    CheckSystem,
    /// Check that every declared arrow is bounded.
    CheckBounded,
    /// Compute and verify the initial structure of every source.
    InitialLift,
    /// Instance checks of the four requirements on every lattice.
    CheckReqs,
    /// Ideal complete distributivity at the top of every lattice.
    Icd,
    /// Print the spatialization of every system.
    Spatialize,
    /// Print the embedding of every space as a system.
    Embed,
    /// Verify the reflection arrow and its universal property.
    CheckReflection,
    /// Print the basis object of every system and morphism.
    Loc,
    /// Run the full property suite.
    Laws,
}

impl Command {
    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }
}

/// Tuning shared by all commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub truncation_level: u32,
    pub probe_bound: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            truncation_level: 6,
            probe_bound: 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bornolab",
    version,
    about = "Checks lattice-valued bornologies written in the bornolab text format"
)]
pub struct Args {
    pub command: Command,
    /// Input files; declarations may refer across files.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Largest finite coordinate enumerated on ω-based carriers.
    #[arg(long, default_value_t = 6)]
    pub truncation_level: u32,
    /// Largest probe ground set used by the initiality check.
    #[arg(long, default_value_t = 2)]
    pub probe_bound: usize,
}

/// Input errors; they exit with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("nothing to check: no {0} declared")]
    Nothing(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Check(String, Verdict),
    /// A computed declaration in the literal grammar.
    Output(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub echo: String,
    pub entries: Vec<Entry>,
}

impl Report {
    fn new(command: Command, files: &[(String, String)], opts: Options) -> Self {
        let mut echo = format!("bornolab {}", command.name());
        for (f, _) in files {
            echo.push(' ');
            echo.push_str(f);
        }
        let _ = write!(
            echo,
            " --truncation-level {} --probe-bound {}",
            opts.truncation_level, opts.probe_bound
        );
        Report {
            echo,
            entries: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, v: Verdict) {
        self.entries.push(Entry::Check(label.into(), v));
    }

    fn checks(&mut self, cs: Vec<Check>) {
        for (l, v) in cs {
            self.check(l, v);
        }
    }

    fn output(&mut self, text: String) {
        self.entries.push(Entry::Output(text));
    }

    pub fn failures(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e, Entry::Check(_, v) if !v.holds()))
            .count()
    }

    pub fn exit_code(&self) -> u8 {
        if self.failures() == 0 {
            0
        } else {
            1
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("# {}\n", self.echo);
        let mut total = 0;
        for e in &self.entries {
            match e {
                Entry::Check(label, v) => {
                    total += 1;
                    let tag = if v.holds() { "PASS" } else { "FAIL" };
                    match v.detail() {
                        "" => {
                            let _ = writeln!(s, "{tag} {label}");
                        }
                        d => {
                            let _ = writeln!(s, "{tag} {label}: {d}");
                        }
                    }
                }
                Entry::Output(text) => {
                    s.push('\n');
                    s.push_str(text);
                    s.push_str("\n\n");
                }
            }
        }
        let _ = writeln!(s, "# {total} checks, {} failed", self.failures());
        s
    }
}

fn fails(e: impl ToString) -> Verdict {
    Verdict::Fails(e.to_string())
}

fn lattice_detail(l: &CompleteLattice) -> String {
    match l.size() {
        None => "ω-chain".into(),
        Some(n) if l.is_distributive() => format!("{n} elements, distributive"),
        Some(n) => format!("{n} elements, not distributive"),
    }
}

fn check_lattices(files: &[(String, String)], r: &mut Report) -> Result<(), CliError> {
    let mut any = false;
    for (file, src) in files {
        let items = parse_items(src).map_err(|e| LoadError {
            file: file.clone(),
            error: TextError::Parse(e),
        })?;
        for item in items.iter().filter(|i| matches!(i, Item::Lattice { .. })) {
            any = true;
            let spec = lattice_spec(item).expect("lattice item");
            let v = match build_lattice(&spec) {
                Ok(l) => Verdict::Holds(lattice_detail(&l)),
                Err(e) => fails(e),
            };
            r.check(format!("lattice {}", item.name().text), v);
        }
    }
    if any {
        Ok(())
    } else {
        Err(CliError::Nothing("lattices"))
    }
}

fn need<T>(reg: &crate::text::Registry<T>, what: &'static str) -> Result<(), CliError> {
    if reg.is_empty() {
        Err(CliError::Nothing(what))
    } else {
        Ok(())
    }
}

fn space_block(name: &str, sp: &BornSpace) -> String {
    format!(
        "space {name}\n  ground {}\n  basis {}\n  {}",
        sp.ground().name(),
        sp.basis().name(),
        ideal_text(sp.ground(), sp.basis(), sp.bornology().repr())
    )
}

/// `{a -> b, …}` over the probes of `src`.
fn object_table(src: &BasisObject, dst: &BasisObject, m: &ObjectMap, level: u32) -> String {
    let pairs: Vec<String> = src
        .probes(level)
        .iter()
        .map(|b| format!("{} -> {}", src.render(b), dst.render(&m.apply(b))))
        .collect();
    format!("{{ {} }}", pairs.join(", "))
}

fn spaces(ws: &Workspace) -> Vec<(&str, Result<BornSpace, String>)> {
    ws.spaces
        .iter()
        .map(|(n, d)| (n, d.validate().map_err(|e| e.to_string())))
        .collect()
}

fn reflection(ws: &Workspace, r: &mut Report) {
    let targets: Vec<(&str, BornSpace)> = spaces(ws)
        .into_iter()
        .filter_map(|(n, s)| s.ok().map(|s| (n, s)))
        .collect();
    for (name, decl) in ws.systems.iter() {
        let sys = match decl.validate() {
            Ok(s) => s,
            Err(e) => {
                r.check(format!("system {name}: valid"), fails(e));
                continue;
            }
        };
        r.checks(laws::reflection_checks(name, &sys));
        for (tname, target) in &targets {
            if target.basis() != sys.basis()
                || target.ground().len() > UNIQUENESS_BOUND
                || sys.ground().len() > UNIQUENESS_BOUND
            {
                continue;
            }
            let ms = morphisms_into_embedding(&sys, target, &BasisMap::identity(sys.basis()));
            let n = ms.len();
            let v = Verdict::all(
                ms.iter().map(|m| verify_universal_property(&sys, target, m)),
                format!("{n} morphism{}", if n == 1 { "" } else { "s" }),
            );
            r.check(format!("system {name} → E({tname}): universal property"), v);
        }
    }
    for (name, decl) in ws.morphisms.iter() {
        let Some(target) = ws
            .systems
            .get(&decl.via.dst)
            .filter(|s| matches!(s.bobj, BasisObject::Bornology(_)))
        else {
            continue;
        };
        let sp_name = target.bobj_name.clone();
        let v = match (
            ws.morphism_unchecked(name),
            ws.system(&decl.via.src),
            ws.space(&sp_name),
        ) {
            (Ok(m), Ok(sys), Ok(sp)) => verify_universal_property(&sys, &sp, &m),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => fails(e),
        };
        r.check(format!("morphism {name}: universal property"), v);
    }
    for (name, sp) in spaces(ws) {
        let v = match sp {
            Ok(sp) => laws::spat_embed_check(&sp),
            Err(e) => fails(e),
        };
        r.check(format!("space {name}: Spat E = Id"), v);
    }
}

fn dispatch(cmd: Command, ws: &Workspace, opts: Options, r: &mut Report) -> Result<(), CliError> {
    let level = opts.truncation_level;
    match cmd {
        Command::CheckLattice => unreachable!("handled before resolution"),
        Command::CheckSpace => {
            need(&ws.spaces, "spaces")?;
            for (name, sp) in spaces(ws) {
                let v = match sp {
                    Ok(sp) => Verdict::Holds(sp.bornology().render()),
                    Err(e) => fails(e),
                };
                r.check(format!("space {name}"), v);
            }
        }
        Command::CheckSystem => {
            need(&ws.systems, "systems")?;
            for (name, d) in ws.systems.iter() {
                let v = match d.validate() {
                    Ok(_) => Verdict::Holds(String::new()),
                    Err(e) => fails(e),
                };
                r.check(format!("system {name}"), v);
            }
            for (name, _) in ws.morphisms.iter() {
                let v = match ws.morphism_unchecked(name) {
                    Ok(m) => is_system_morphism(&m),
                    Err(e) => fails(e),
                };
                r.check(format!("morphism {name}"), v);
            }
        }
        Command::CheckBounded => {
            need(&ws.arrows, "arrows")?;
            for (name, _) in ws.arrows.iter() {
                let v = match ws.arrow_parts(name) {
                    Ok((s, d, f, psi)) => is_bounded(&f, &psi, &s, &d).unwrap_or_else(fails),
                    Err(e) => fails(e),
                };
                r.check(format!("arrow {name}"), v);
            }
        }
        Command::InitialLift => {
            need(&ws.sources, "sources")?;
            for (name, _) in ws.sources.iter() {
                let src = match ws.source(name) {
                    Ok(s) => s,
                    Err(e) => {
                        r.check(format!("source {name}"), fails(e));
                        continue;
                    }
                };
                if let Ok(tau) = crate::lift::initial_structure(&src) {
                    r.output(format!(
                        "space Lift_{name}\n  ground {}\n  basis {}\n  {}",
                        src.apex().name(),
                        src.basis().name(),
                        ideal_text(src.apex(), src.basis(), tau.repr())
                    ));
                }
                r.checks(laws::lift_checks(name, &src, level, opts.probe_bound));
            }
        }
        Command::CheckReqs => {
            need(&ws.lattices, "lattices")?;
            for (name, l) in ws.lattices.iter() {
                let rep = check_requirements(l);
                for (req, v) in rep.verdicts() {
                    r.check(format!("lattice {name}: {req}"), v.clone());
                }
            }
        }
        Command::Icd => {
            need(&ws.lattices, "lattices")?;
            for (name, l) in ws.lattices.iter() {
                r.check(format!("lattice {name}: icd at ⊤"), is_icd_at_top(l));
            }
        }
        Command::Spatialize => {
            need(&ws.systems, "systems")?;
            for (name, d) in ws.systems.iter() {
                match d
                    .validate()
                    .map_err(|e| e.to_string())
                    .and_then(|s| spatialize(&s).map_err(|e| e.to_string()))
                {
                    Ok(sp) => {
                        r.output(space_block(&format!("Spat_{name}"), &sp));
                        r.check(format!("system {name}: spatializes"), Verdict::Holds(String::new()));
                    }
                    Err(e) => r.check(format!("system {name}: spatializes"), fails(e)),
                }
            }
        }
        Command::Embed => {
            need(&ws.spaces, "spaces")?;
            for (name, sp) in spaces(ws) {
                let sp = match sp {
                    Ok(sp) => sp,
                    Err(e) => {
                        r.check(format!("space {name}: embeds"), fails(e));
                        continue;
                    }
                };
                let e = embed_space(&sp);
                r.output(format!(
                    "system E_{name}\n  ground {}\n  basis {}\n  bobj {name}\n  kappa inclusion",
                    sp.ground().name(),
                    sp.basis().name()
                ));
                let v = match validate_system(e.ground(), e.kappa().clone(), e.bobj().clone(), e.basis()) {
                    Ok(_) => Verdict::Holds(String::new()),
                    Err(err) => fails(err),
                };
                r.check(format!("space {name}: E({name}) is a system"), v);
                r.check(format!("space {name}: Spat E = Id"), laws::spat_embed_check(&sp));
            }
        }
        Command::CheckReflection => {
            need(&ws.systems, "systems")?;
            reflection(ws, r);
        }
        Command::Loc => {
            need(&ws.systems, "systems")?;
            for (name, d) in ws.systems.iter() {
                match d.validate() {
                    Ok(sys) => {
                        let shown = match loc(&sys) {
                            BasisObject::Bornology(i) => format!("{} = {}", d.bobj_name, i.render()),
                            _ => d.bobj_name.clone(),
                        };
                        r.output(format!("# loc {name} = {shown}"));
                        r.check(format!("system {name}: loc"), Verdict::Holds(String::new()));
                    }
                    Err(e) => r.check(format!("system {name}: loc"), fails(e)),
                }
            }
            for (name, _) in ws.morphisms.iter() {
                match ws.morphism(name) {
                    Ok(m) => {
                        let decl = ws.morphisms.get(name).expect("declared");
                        let bobj = |s: &str| ws.systems.get(s).expect("resolved").bobj_name.clone();
                        let table = object_table(m.src().bobj(), m.dst().bobj(), loc_morphism(&m), level);
                        r.output(format!(
                            "# loc {name} : {} -> {} {table}",
                            bobj(&decl.via.src),
                            bobj(&decl.via.dst)
                        ));
                        r.check(format!("morphism {name}: loc"), Verdict::Holds(String::new()));
                    }
                    Err(e) => r.check(format!("morphism {name}: loc"), fails(e)),
                }
            }
        }
        Command::Laws => r.checks(laws::run(ws, level, opts.probe_bound)),
    }
    Ok(())
}

/// Runs a command on named file contents.
pub fn run(cmd: Command, files: &[(String, String)], opts: Options) -> Result<Report, CliError> {
    let mut report = Report::new(cmd, files, opts);
    if cmd == Command::CheckLattice {
        check_lattices(files, &mut report)?;
    } else {
        let ws = parse_files(files)?;
        dispatch(cmd, &ws, opts, &mut report)?;
    }
    Ok(report)
}

fn read(files: &[PathBuf]) -> Result<Vec<(String, String)>, CliError> {
    files
        .iter()
        .map(|p| {
            let name = p.display().to_string();
            std::fs::read_to_string(p)
                .map(|s| (name.clone(), s))
                .map_err(|e| CliError::Io(name, e))
        })
        .collect()
}

/// Entry point of the binary: 0 when every check passes, 1 when one fails,
/// 2 on input errors.
pub fn main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let opts = Options {
        truncation_level: args.truncation_level,
        probe_bound: args.probe_bound,
    };
    match read(&args.files).and_then(|files| run(args.command, &files, opts)) {
        Ok(report) => {
            print!("{}", report.render());
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

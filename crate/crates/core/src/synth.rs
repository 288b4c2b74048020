//! Synthetic inputs: random GRAAMs, random MiniLang programs whose
//! independent statements can be reordered, and template-generated corpora
//! for two small frameworks.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::Error;
use crate::graam::Graam;
use crate::manifest::FrameworkManifest;
use crate::slicer::ApiLabel;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random GRAAM with `1..=max_api` API nodes drawn from a pool of
/// `n_labels` labels. Edges only go forward in a hidden order, so the
/// result is acyclic.
pub fn random_graam(rng: &mut impl Rng, max_api: usize, n_labels: usize) -> Graam {
    let n = rng.gen_range(1..=max_api.max(1));
    let labels: Vec<ApiLabel> =
        (0..n).map(|_| ApiLabel::invoke("fw.T", &format!("m{}/0", rng.gen_range(0..n_labels.max(1))))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let p = rng.gen_range(0.15..0.6);
    let mut cons = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                cons.push((order[i], order[j]));
            }
        }
    }
    Graam::from_api("fw", labels, &cons).expect("forward edges are acyclic")
}

/// A GRAAM with the same structure whose nodes are listed in a different
/// order.
pub fn shuffled_copy(rng: &mut impl Rng, g: &Graam) -> Graam {
    let labels = g.api_labels();
    let mut perm: Vec<usize> = (0..labels.len()).collect();
    perm.shuffle(rng);
    let mut out = vec![labels[0].clone(); labels.len()];
    for (i, &p) in perm.iter().enumerate() {
        out[p] = labels[i].clone();
    }
    let cons: Vec<(usize, usize)> = g.api_constraints().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    Graam::from_api(&g.framework, out, &cons).expect("relabelled DAG")
}

/// One line of a generated method body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub text: String,
    pub defs: Vec<String>,
    pub uses: Vec<String>,
    /// Indices of lines that must come earlier for reasons other than data.
    pub after: Vec<usize>,
}

impl Line {
    fn new(text: impl Into<String>, defs: &[&str], uses: &[&str], after: &[usize]) -> Line {
        Line {
            text: text.into(),
            defs: defs.iter().map(|s| s.to_string()).collect(),
            uses: uses.iter().map(|s| s.to_string()).collect(),
            after: after.to_vec(),
        }
    }
}

/// Direct predecessors of each line: the definer of every used variable plus
/// the explicit `after` lines.
fn line_deps(lines: &[Line]) -> Vec<BTreeSet<usize>> {
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut d: BTreeSet<usize> = l.after.iter().copied().collect();
            for u in &l.uses {
                if let Some(j) = lines[..i].iter().rposition(|x| x.defs.contains(u)) {
                    d.insert(j);
                }
            }
            d
        })
        .collect()
}

/// A uniformly chosen ready line at each step: a random linear extension of
/// the dependence order.
pub fn random_order(rng: &mut impl Rng, lines: &[Line]) -> Vec<usize> {
    let deps = line_deps(lines);
    let mut placed = vec![false; lines.len()];
    let mut out = Vec::with_capacity(lines.len());
    while out.len() < lines.len() {
        let ready: Vec<usize> =
            (0..lines.len()).filter(|&i| !placed[i] && deps[i].iter().all(|&d| placed[d])).collect();
        let pick = *ready.choose(rng).expect("dependences are acyclic");
        placed[pick] = true;
        out.push(pick);
    }
    out
}

/// A single-entry program over an unnamed framework package `fw`.
#[derive(Debug, Clone)]
pub struct RandomProgram {
    pub imports: Vec<String>,
    pub lines: Vec<Line>,
}

impl RandomProgram {
    pub fn render(&self, order: &[usize]) -> String {
        let mut s = String::new();
        for i in &self.imports {
            s.push_str(&format!("import {i};\n"));
        }
        s.push_str("\nclass Prog {\n    static void main() {\n");
        for &i in order {
            s.push_str(&format!("        {}\n", self.lines[i].text));
        }
        s.push_str("    }\n}\n");
        s
    }

    pub fn render_in_order(&self) -> String {
        self.render(&(0..self.lines.len()).collect::<Vec<_>>())
    }
}

pub fn random_manifest() -> FrameworkManifest {
    FrameworkManifest::new("fw", &["fw."])
}

/// Framework calls over types `fw.A`..`fw.D`, with data flowing between
/// them directly and through plain local copies, mixed with unrelated
/// local statements.
pub fn random_program(rng: &mut impl Rng, max_api: usize) -> RandomProgram {
    const TYPES: [&str; 4] = ["A", "B", "C", "D"];
    let mut lines: Vec<Line> = Vec::new();
    let mut objects: Vec<(String, &str)> = Vec::new();
    let mut values: Vec<String> = Vec::new();
    let n_api = rng.gen_range(1..=max_api.max(1));
    let mut api = 0;
    let mut k = 0;
    while api < n_api {
        k += 1;
        let pick_args = |rng: &mut dyn rand::RngCore, values: &[String]| -> Vec<String> {
            let mut args: Vec<String> = Vec::new();
            for _ in 0..rng.gen_range(0..=2usize) {
                if let Some(v) = values.choose(rng) {
                    if !args.contains(v) {
                        args.push(v.clone());
                    }
                }
            }
            args
        };
        match rng.gen_range(0..10) {
            0..=2 => {
                let ty = TYPES[rng.gen_range(0..TYPES.len())];
                let args = pick_args(rng, &values);
                let v = format!("o{k}");
                let uses: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
                lines.push(Line::new(format!("{ty} {v} = new {ty}({});", args.join(", ")), &[&v], &uses, &[]));
                objects.push((v.clone(), ty));
                values.push(v);
                api += 1;
            }
            3..=4 => {
                let ty = TYPES[rng.gen_range(0..TYPES.len())];
                let m = rng.gen_range(0..3);
                let args = pick_args(rng, &values);
                let v = format!("r{k}");
                let uses: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
                lines.push(Line::new(format!("Object {v} = {ty}.s{m}({});", args.join(", ")), &[&v], &uses, &[]));
                values.push(v);
                api += 1;
            }
            5..=7 if !objects.is_empty() => {
                let (recv, _) = objects.choose(rng).expect("non-empty").clone();
                let m = rng.gen_range(0..3);
                let args = pick_args(rng, &values);
                let v = format!("r{k}");
                let mut uses: Vec<&str> = vec![recv.as_str()];
                uses.extend(args.iter().map(|s| s.as_str()));
                lines.push(Line::new(format!("Object {v} = {recv}.m{m}({});", args.join(", ")), &[&v], &uses, &[]));
                values.push(v);
                api += 1;
            }
            8 if !values.is_empty() => {
                let src = values.choose(rng).expect("non-empty").clone();
                let v = format!("c{k}");
                lines.push(Line::new(format!("Object {v} = {src};"), &[&v], &[&src], &[]));
                values.push(v);
            }
            _ => {
                let v = format!("d{k}");
                lines.push(Line::new(format!("int {v} = {k};"), &[&v], &[], &[]));
            }
        }
    }
    RandomProgram { imports: TYPES.iter().map(|t| format!("fw.{t}")).collect(), lines }
}

/// Statements of one usage pattern.
#[derive(Debug, Clone)]
pub struct Template {
    pub name: &'static str,
    pub lines: Vec<Line>,
}

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub name: &'static str,
    pub package: &'static str,
    /// `(file name, source)` of the framework itself.
    pub framework: Vec<(&'static str, &'static str)>,
    pub imports: Vec<&'static str>,
    /// Application classes every unit declares.
    pub app_classes: &'static str,
    pub templates: Vec<Template>,
}

const DISTRACTORS: &[&str] = &[
    "int retries = 3;",
    "System.out.println(\"starting\");",
    "String tag = \"run\";",
    "long started = System.currentTimeMillis();",
    "boolean verbose = false;",
];

const MINIAUTH_LOGIN_CONTEXT: &str = r#"package miniauth;

public class LoginContext {
    private Subject subject;
    private boolean loginSucceeded;
    private String name;

    public LoginContext(String name, CallbackHandler handler) {
        this.name = name;
    }

    public LoginContext(String name, Subject subject, CallbackHandler handler) {
        this.name = name;
    }

    public LoginContext(String name, Subject subject, CallbackHandler handler, Configuration config) {
        this.name = name;
    }

    public void login() throws LoginException {
        loginSucceeded = false;
        subject = new Subject();
        loginSucceeded = true;
    }

    public Subject getSubject() {
        return subject;
    }

    public void logout() throws LoginException {
        if (loginSucceeded) {
            System.out.println("logged out");
        }
    }
}
"#;

const MINIAUTH_SUBJECT: &str = r#"package miniauth;

public class Subject {
    private Object principals;

    public Subject() {
    }

    public Object getPrincipals() {
        return principals;
    }
}
"#;

const MINIAUTH_CONFIGURATION: &str = r#"package miniauth;

public class Configuration {
    private Object entries;

    public static Configuration getConfiguration() {
        return new Configuration();
    }

    public void refresh() {
        entries = null;
    }
}
"#;

const MINIAUTH_CALLBACKS: &str = r#"package miniauth;

public interface CallbackHandler {
    void handle(Object callbacks);
}

public class LoginException extends Exception {
}
"#;

const MINIRMI_REGISTRY: &str = r#"package minirmi;

public class Registry {
    private Object bindings;

    public void bind(String name, Remote obj) {
        bindings = obj;
    }

    public void rebind(String name, Remote obj) {
        bindings = obj;
    }

    public Remote lookup(String name) {
        return bindings;
    }

    public void unbind(String name) {
        bindings = null;
    }
}

public class LocateRegistry {
    public static Registry getRegistry(String host, int port) {
        return new Registry();
    }

    public static Registry createRegistry(int port) {
        return new Registry();
    }
}
"#;

const MINIRMI_REMOTE: &str = r#"package minirmi;

public interface Remote {
}

public class RemoteException extends Exception {
}

public class UnicastRemoteObject {
    public static Remote exportObject(Remote obj, int port) {
        return obj;
    }

    public static boolean unexportObject(Remote obj, boolean force) {
        return true;
    }
}

public class Naming {
    public static Remote lookup(String url) {
        return null;
    }

    public static void rebind(String url, Remote obj) {
    }
}
"#;

fn t(name: &'static str, lines: Vec<Line>) -> Template {
    Template { name, lines }
}

/// A login framework in the style of JAAS.
pub fn miniauth() -> CorpusSpec {
    let subject = || Line::new("Subject subject = new Subject();", &["subject"], &[], &[]);
    let handler = || Line::new("CallbackHandler handler = new AppHandler(\"user\", \"secret\");", &["handler"], &[], &[]);
    let lc3 = || {
        Line::new(
            "LoginContext lc = new LoginContext(\"app\", subject, handler);",
            &["lc"],
            &["subject", "handler"],
            &[],
        )
    };
    let login = || Line::new("lc.login();", &[], &["lc"], &[]);
    CorpusSpec {
        name: "miniauth",
        package: "miniauth",
        framework: vec![
            ("LoginContext.mini", MINIAUTH_LOGIN_CONTEXT),
            ("Subject.mini", MINIAUTH_SUBJECT),
            ("Configuration.mini", MINIAUTH_CONFIGURATION),
            ("Callbacks.mini", MINIAUTH_CALLBACKS),
        ],
        imports: vec![
            "miniauth.CallbackHandler",
            "miniauth.Configuration",
            "miniauth.LoginContext",
            "miniauth.LoginException",
            "miniauth.Subject",
        ],
        app_classes: "class AppHandler implements CallbackHandler {\n    AppHandler(String user, String password) {\n    }\n\n    public void handle(Object callbacks) {\n    }\n}\n",
        templates: vec![
            t("login", vec![subject(), handler(), lc3(), login()]),
            t(
                "login-principals",
                vec![
                    subject(),
                    handler(),
                    lc3(),
                    login(),
                    Line::new("Subject authed = lc.getSubject();", &["authed"], &["lc"], &[3]),
                    Line::new("Object principals = authed.getPrincipals();", &["principals"], &["authed"], &[]),
                ],
            ),
            t(
                "login-logout",
                vec![
                    handler(),
                    Line::new("LoginContext lc = new LoginContext(\"app\", handler);", &["lc"], &["handler"], &[]),
                    login(),
                    Line::new("lc.logout();", &[], &["lc"], &[2]),
                ],
            ),
            t(
                "configured-login",
                vec![
                    Line::new("Configuration config = Configuration.getConfiguration();", &["config"], &[], &[]),
                    Line::new("config.refresh();", &[], &["config"], &[]),
                    subject(),
                    handler(),
                    Line::new(
                        "LoginContext lc = new LoginContext(\"app\", subject, handler, config);",
                        &["lc"],
                        &["subject", "handler", "config"],
                        &[],
                    ),
                    login(),
                    Line::new("lc.logout();", &[], &["lc"], &[5]),
                ],
            ),
            t(
                "subject-only",
                vec![
                    subject(),
                    Line::new("Object principals = subject.getPrincipals();", &["principals"], &["subject"], &[]),
                ],
            ),
        ],
    }
}

/// A remote-object registry framework in the style of Java RMI.
pub fn minirmi() -> CorpusSpec {
    let svc = || Line::new("Service svc = new Service();", &["svc"], &[], &[]);
    let export = || Line::new("Remote stub = UnicastRemoteObject.exportObject(svc, 0);", &["stub"], &["svc"], &[]);
    CorpusSpec {
        name: "minirmi",
        package: "minirmi",
        framework: vec![("Registry.mini", MINIRMI_REGISTRY), ("Remote.mini", MINIRMI_REMOTE)],
        imports: vec![
            "minirmi.LocateRegistry",
            "minirmi.Naming",
            "minirmi.Registry",
            "minirmi.Remote",
            "minirmi.UnicastRemoteObject",
        ],
        app_classes: "class Service implements Remote {\n    Service() {\n    }\n}\n",
        templates: vec![
            t(
                "create-bind",
                vec![
                    svc(),
                    export(),
                    Line::new("Registry reg = LocateRegistry.createRegistry(1099);", &["reg"], &[], &[]),
                    Line::new("reg.bind(\"svc\", stub);", &[], &["reg", "stub"], &[]),
                ],
            ),
            t(
                "get-rebind",
                vec![
                    svc(),
                    export(),
                    Line::new("Registry reg = LocateRegistry.getRegistry(\"localhost\", 1099);", &["reg"], &[], &[]),
                    Line::new("reg.rebind(\"svc\", stub);", &[], &["reg", "stub"], &[]),
                ],
            ),
            t(
                "naming-forward",
                vec![
                    Line::new("Remote obj = Naming.lookup(\"rmi://host/svc\");", &["obj"], &[], &[]),
                    Line::new("Naming.rebind(\"rmi://host/copy\", obj);", &[], &["obj"], &[]),
                ],
            ),
            t(
                "naming-export",
                vec![
                    svc(),
                    export(),
                    Line::new("Naming.rebind(\"rmi://host/svc\", stub);", &[], &["stub"], &[]),
                    Line::new("UnicastRemoteObject.unexportObject(svc, true);", &[], &["svc"], &[]),
                ],
            ),
            t(
                "create-roundtrip",
                vec![
                    svc(),
                    export(),
                    Line::new("Registry reg = LocateRegistry.createRegistry(2099);", &["reg"], &[], &[]),
                    Line::new("reg.rebind(\"svc\", stub);", &[], &["reg", "stub"], &[]),
                    Line::new("Remote back = reg.lookup(\"svc\");", &["back"], &["reg"], &[3]),
                    Line::new("reg.unbind(\"svc\");", &[], &["reg"], &[4]),
                ],
            ),
        ],
    }
}

pub fn corpus_spec(name: &str) -> Option<CorpusSpec> {
    match name {
        "miniauth" => Some(miniauth()),
        "minirmi" => Some(minirmi()),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthUnit {
    pub name: String,
    pub source: String,
    pub template: usize,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub manifest: FrameworkManifest,
    pub framework: Vec<(String, String)>,
    pub units: Vec<SynthUnit>,
}

impl CorpusSpec {
    pub fn manifest(&self) -> FrameworkManifest {
        let mut m = FrameworkManifest::new(self.name, &[&format!("{}.", self.package)]);
        m.source = Some("framework".into());
        m
    }

    pub fn framework_sources(&self) -> Vec<(String, String)> {
        self.framework.iter().map(|(n, s)| (n.to_string(), s.to_string())).collect()
    }

    /// One unit of template `ti`, its statements in a random valid order
    /// with a few unrelated statements mixed in.
    pub fn render_unit(&self, rng: &mut impl Rng, ti: usize, class: &str) -> String {
        let lines = &self.templates[ti].lines;
        let order = random_order(rng, lines);
        let mut body: Vec<&str> = order.iter().map(|&i| lines[i].text.as_str()).collect();
        let mut extra: Vec<&str> = DISTRACTORS.to_vec();
        extra.shuffle(rng);
        for d in extra.into_iter().take(rng.gen_range(0..=3)) {
            let at = rng.gen_range(0..=body.len());
            body.insert(at, d);
        }
        let mut s = String::new();
        for i in &self.imports {
            s.push_str(&format!("import {i};\n"));
        }
        s.push('\n');
        s.push_str(self.app_classes);
        s.push_str(&format!("\npublic class {class} {{\n    public static void main(String[] args) {{\n"));
        for line in body {
            s.push_str(&format!("        {line}\n"));
        }
        s.push_str("    }\n}\n");
        s
    }

    /// `copies` units of every template, shuffled.
    pub fn generate(&self, copies: usize, seed: u64) -> Corpus {
        let mut r = rng(seed);
        let mut plan: Vec<usize> = (0..self.templates.len()).flat_map(|t| std::iter::repeat_n(t, copies)).collect();
        plan.shuffle(&mut r);
        let units = plan
            .into_iter()
            .enumerate()
            .map(|(i, ti)| {
                let class = format!("Usage{i:03}");
                SynthUnit { name: format!("{}_{i:03}", self.name), source: self.render_unit(&mut r, ti, &class), template: ti }
            })
            .collect();
        Corpus { manifest: self.manifest(), framework: self.framework_sources(), units }
    }
}

impl Corpus {
    /// Lays the corpus out as `framework.toml`, `framework/*.mini` and
    /// `units/*.mini` under `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), Error> {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        std::fs::create_dir_all(dir.join("framework")).map_err(io)?;
        std::fs::create_dir_all(dir.join("units")).map_err(io)?;
        std::fs::write(dir.join("framework.toml"), self.manifest.to_toml()).map_err(io)?;
        for (name, src) in &self.framework {
            std::fs::write(dir.join("framework").join(name), src).map_err(io)?;
        }
        for u in &self.units {
            std::fs::write(dir.join("units").join(format!("{}.mini", u.name)), &u.source).map_err(io)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_order_respects_definitions() {
        let p = random_program(&mut rng(7), 8);
        for seed in 0..20 {
            let order = random_order(&mut rng(seed), &p.lines);
            let pos: Vec<usize> = {
                let mut v = vec![0; order.len()];
                for (at, &i) in order.iter().enumerate() {
                    v[i] = at;
                }
                v
            };
            for (i, deps) in line_deps(&p.lines).iter().enumerate() {
                assert!(deps.iter().all(|&d| pos[d] < pos[i]));
            }
        }
    }

    #[test]
    fn corpus_generation_is_seeded() {
        let a = miniauth().generate(2, 5);
        let b = miniauth().generate(2, 5);
        assert_eq!(a.units, b.units);
        assert_eq!(a.units.len(), 10);
    }

    #[test]
    fn random_graam_respects_bound() {
        let mut r = rng(1);
        for _ in 0..50 {
            let g = random_graam(&mut r, 6, 3);
            assert!((1..=6).contains(&g.api_count()));
        }
    }
}

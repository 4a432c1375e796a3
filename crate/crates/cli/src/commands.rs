use std::io::{Read, Write};
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use bwtx_core::analysis::{self, DEFAULT_MAX_GAP};
use bwtx_core::escape::{escape_byte, escape_bytes};
use bwtx_core::session::{save_session, Session};
use bwtx_core::{
    build_transform, parse_ordering, preset_ordering_with, window, AlphabetOrdering, Preset,
    PresetTables, RunStatistics, TextBuffer, Transform, WindowSpec,
};
use clap::ArgMatches;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{AnalysisKind, Cli, Command, Format, Input, Save, SingleOrdering, WindowArg};
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli, matches: &ArgMatches, out: &mut dyn Write) -> Result<()> {
    let tables = load_tables(cli.chapin_tate.as_deref())?;
    match cli.command {
        Command::Transform {
            input,
            ordering,
            format,
            save,
        } => {
            let text = load_text(&input)?;
            let ordering = single_ordering(&ordering, &text, &tables)?;
            let t = build_transform(text, ordering)?;
            print_transform(&t, format, out)?;
            save_transforms(&save, vec![t])
        }
        Command::Stats {
            input,
            format,
            jobs,
            save,
            ..
        } => {
            let text = load_text(&input)?;
            let sub = matches.subcommand_matches("stats").expect("stats matches");
            let orderings = stats_orderings(sub, &text, &tables)?;
            let jobs = jobs
                .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
                .unwrap_or(1);
            let built = build_all(&text, orderings, jobs)?;
            print_stats(&built, format, out)?;
            save_transforms(&save, built)
        }
        Command::Window {
            input,
            ordering,
            window: spec,
            format,
        } => {
            let text = load_text(&input)?;
            let ordering = single_ordering(&ordering, &text, &tables)?;
            let t = build_transform(text, ordering)?;
            print_window(&t, spec, format, out)
        }
        Command::Analyze {
            input,
            ordering,
            kind,
            max_gap,
            section,
        } => {
            let text = load_text(&input)?;
            let ordering = single_ordering(&ordering, &text, &tables)?;
            let t = build_transform(text, ordering)?;
            let payload = analyze(&t, kind, max_gap, section)?;
            write_json(&payload, out)
        }
        Command::Serve { port, bind } => serve(SocketAddr::new(bind, port), tables, out),
    }
}

fn load_tables(path: Option<&Path>) -> Result<PresetTables> {
    let Some(path) = path else {
        return Ok(PresetTables::default());
    };
    let contents =
        std::fs::read(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    Ok(PresetTables {
        chapin_tate: Some(PresetTables::parse_chapin_tate(&contents)?),
    })
}

fn load_text(input: &Input) -> Result<Arc<TextBuffer>> {
    let data = match (&input.text, &input.input) {
        (Some(text), _) => text.clone().into_bytes(),
        (None, Some(path)) if path.as_os_str() != "-" => std::fs::read(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?,
        _ => {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| CliError::io("reading standard input", e))?;
            buf
        }
    };
    Ok(Arc::new(TextBuffer::new(data)?))
}

fn preset(name: &str, text: &TextBuffer, tables: &PresetTables) -> Result<AlphabetOrdering> {
    let preset: Preset = name.parse()?;
    Ok(preset_ordering_with(preset, text, tables)?)
}

fn custom(spec: &str, text: &TextBuffer) -> Result<AlphabetOrdering> {
    let ordering = parse_ordering(spec, text)?;
    let name = ordering.display_order();
    Ok(ordering.with_name(name))
}

fn single_ordering(
    spec: &SingleOrdering,
    text: &TextBuffer,
    tables: &PresetTables,
) -> Result<AlphabetOrdering> {
    match (&spec.ordering, &spec.preset) {
        (Some(s), _) => custom(s, text),
        (None, Some(p)) => preset(p, text, tables),
        (None, None) => preset("ascii", text, tables),
    }
}

/// Orderings for `stats` in command-line order, all validated up front.
fn stats_orderings(
    sub: &ArgMatches,
    text: &TextBuffer,
    tables: &PresetTables,
) -> Result<Vec<AlphabetOrdering>> {
    let mut given: Vec<(usize, bool, &String)> = Vec::new();
    for (id, is_preset) in [("ordering", false), ("preset", true)] {
        if let (Some(idx), Some(vals)) = (sub.indices_of(id), sub.get_many::<String>(id)) {
            given.extend(idx.zip(vals).map(|(i, v)| (i, is_preset, v)));
        }
    }
    given.sort_by_key(|&(i, ..)| i);
    if given.is_empty() {
        let available = Preset::ALL
            .into_iter()
            .filter(|&p| p != Preset::ChapinTate || tables.chapin_tate.is_some());
        return available
            .map(|p| Ok(preset_ordering_with(p, text, tables)?))
            .collect();
    }
    given
        .into_iter()
        .map(|(_, is_preset, v)| {
            if is_preset {
                preset(v, text, tables)
            } else {
                custom(v, text)
            }
        })
        .collect()
}

fn build_all(
    text: &Arc<TextBuffer>,
    orderings: Vec<AlphabetOrdering>,
    jobs: usize,
) -> Result<Vec<Transform>> {
    let jobs = jobs.clamp(1, orderings.len().max(1));
    let chunk = orderings.len().div_ceil(jobs).max(1);
    let results: Vec<Result<Vec<Transform>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = orderings
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|o| Ok(build_transform(text.clone(), o.clone())?))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut built = Vec::with_capacity(orderings.len());
    for part in results {
        built.extend(part?);
    }
    Ok(built)
}

fn save_transforms(save: &Save, transforms: Vec<Transform>) -> Result<()> {
    let Some(path) = &save.session else {
        return Ok(());
    };
    let Some(first) = transforms.first() else {
        return Ok(());
    };
    let mut session = Session::new(first.text().clone());
    for t in transforms {
        session.add_transform(Arc::new(t))?;
    }
    let bytes = save_session(&session, save.cache)?;
    std::fs::write(path, bytes).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

fn write_json(value: &impl Serialize, out: &mut dyn Write) -> Result<()> {
    let s = serde_json::to_string_pretty(value).expect("serializable");
    writeln!(out, "{s}").map_err(|e| CliError::io("writing output", e))
}

fn io(r: std::io::Result<()>) -> Result<()> {
    r.map_err(|e| CliError::io("writing output", e))
}

#[derive(Serialize)]
struct StatsRow<'a> {
    ordering: &'a str,
    order: String,
    #[serde(flatten)]
    stats: &'a RunStatistics,
}

fn stats_row(t: &Transform) -> StatsRow<'_> {
    StatsRow {
        ordering: t.ordering().name(),
        order: t.ordering().display_order(),
        stats: t.stats(),
    }
}

fn print_transform(t: &Transform, format: Format, out: &mut dyn Write) -> Result<()> {
    let s = t.stats();
    match format {
        Format::Text => io(write!(
            out,
            "ordering: {}\nlast column: {}\nend marker: {}\nr: {}\nrle_length: {}\n",
            t.ordering().display_order(),
            escape_bytes(t.last_column()),
            escape_byte(s.end_marker_used),
            s.run_count,
            s.rle_length,
        )),
        Format::Json => write_json(
            &json!({
                "ordering": t.ordering().name(),
                "order": t.ordering().display_order(),
                "last_column": escape_bytes(t.last_column()),
                "end_marker": escape_byte(s.end_marker_used),
                "stats": s,
            }),
            out,
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let row = [
                t.ordering().name().to_string(),
                escape_bytes(t.last_column()),
                escape_byte(s.end_marker_used),
                s.run_count.to_string(),
                s.rle_length.to_string(),
            ];
            write_csv(
                &mut w,
                &["ordering", "last_column", "end_marker", "r", "rle_length"],
                &[row],
            )
        }
    }
}

fn write_csv<W: Write, const N: usize>(
    w: &mut csv::Writer<W>,
    header: &[&str; N],
    rows: &[[String; N]],
) -> Result<()> {
    let err = |e: csv::Error| CliError::io("writing output", e.into());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io("writing output", e))
}

fn print_stats(built: &[Transform], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => {
            let rows: Vec<[String; 3]> = built
                .iter()
                .map(|t| {
                    [
                        t.ordering().name().to_string(),
                        t.stats().run_count.to_string(),
                        t.stats().rle_length.to_string(),
                    ]
                })
                .collect();
            write_csv(
                &mut csv::Writer::from_writer(out),
                &["ordering", "r", "rle_length"],
                &rows,
            )
        }
        Format::Json => write_json(&built.iter().map(stats_row).collect::<Vec<_>>(), out),
        Format::Text => {
            let width = built
                .iter()
                .map(|t| t.ordering().name().len())
                .chain(["ordering".len()])
                .max()
                .unwrap_or(0);
            io(writeln!(
                out,
                "{:<width$}  {:>10}  {:>10}",
                "ordering", "r", "rle_length"
            ))?;
            for t in built {
                let s = t.stats();
                io(writeln!(
                    out,
                    "{:<width$}  {:>10}  {:>10}",
                    t.ordering().name(),
                    s.run_count,
                    s.rle_length
                ))?;
            }
            Ok(())
        }
    }
}

fn print_window(t: &Transform, spec: WindowArg, format: Format, out: &mut dyn Write) -> Result<()> {
    let g = window(
        t,
        WindowSpec::new(spec.top, spec.left, spec.rows, spec.cols),
    )?;
    match format {
        Format::Text => {
            let label = (g.top_row + g.height).to_string().len();
            for (i, row) in g.rows().enumerate() {
                io(writeln!(
                    out,
                    "{:>label$}  {}  | {}",
                    g.top_row + i,
                    escape_bytes(row),
                    escape_byte(g.last_column[i])
                ))?;
            }
            Ok(())
        }
        Format::Json => write_json(
            &json!({
                "size": t.len(),
                "top_row": g.top_row,
                "left_col": g.left_col,
                "height": g.height,
                "width": g.width,
                "truncated": g.truncated,
                "rows": g.rows().map(escape_bytes).collect::<Vec<_>>(),
                "last_column": escape_bytes(&g.last_column),
            }),
            out,
        ),
        Format::Csv => Err(CliError::Usage(
            "window output supports text or json".into(),
        )),
    }
}

fn analyze(
    t: &Transform,
    kind: AnalysisKind,
    max_gap: Option<usize>,
    section: Option<usize>,
) -> Result<Value> {
    let ordering = t.ordering().display_order();
    Ok(match kind {
        AnalysisKind::RunBreakers => json!({
            "kind": "run_breakers",
            "ordering": ordering,
            "items": analysis::run_breakers(t),
        }),
        AnalysisKind::PotentialRuns => {
            let gap = max_gap.unwrap_or(DEFAULT_MAX_GAP);
            json!({
                "kind": "potential_runs",
                "ordering": ordering,
                "max_gap": gap,
                "items": analysis::potential_runs(t, gap),
            })
        }
        AnalysisKind::Sections => json!({
            "kind": "sections",
            "ordering": ordering,
            "items": analysis::sections(t),
        }),
        AnalysisKind::Pairs => {
            let sections = analysis::sections(t);
            let chosen: Vec<(usize, &analysis::Section)> = match section {
                Some(i) => {
                    let s = sections.get(i).ok_or_else(|| {
                        CliError::Usage(format!("section {i} out of range (0..{})", sections.len()))
                    })?;
                    vec![(i, s)]
                }
                None => sections.iter().enumerate().collect(),
            };
            let mut items = Vec::new();
            for (i, s) in chosen {
                let pairs = analysis::distinguishing_pairs(t, s)?;
                if section.is_some() || !pairs.is_empty() {
                    items.push(json!({ "section": i, "first_char": s.first_char, "rows": s.rows, "pairs": pairs }));
                }
            }
            json!({ "kind": "pairs", "ordering": ordering, "items": items })
        }
    })
}

fn serve(addr: SocketAddr, tables: PresetTables, out: &mut dyn Write) -> Result<()> {
    let runtime =
        tokio::runtime::Runtime::new().map_err(|e| CliError::io("starting runtime", e))?;
    runtime.block_on(async {
        let listener = bwtx_server::bind(addr)
            .await
            .map_err(|e| CliError::io(format!("binding {addr}"), e))?;
        let local = listener
            .local_addr()
            .map_err(|e| CliError::io("reading bound address", e))?;
        io(writeln!(out, "listening on http://{local}"))?;
        io(out.flush())?;
        let config = bwtx_server::ServiceConfig {
            tables,
            ..Default::default()
        };
        bwtx_server::serve(listener, config)
            .await
            .map_err(|e| CliError::io("serving", e))
    })
}

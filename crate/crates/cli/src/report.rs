//! Render report printed to standard output.

use std::collections::BTreeMap;
use std::path::Path;

use sonify_core::render::{RenderPlan, RenderResult, SourceSet};
use sonify_core::score::parse_note;

fn describe_sources(plan: &RenderPlan) -> String {
    match &plan.sources {
        SourceSet::Events(e) => format!("{} events", e.count()),
        SourceSet::Object(_) => "1 object".to_string(),
    }
}

fn header(plan: &RenderPlan) -> String {
    let mut out = String::new();
    out.push_str(&format!("  sources:      {}\n", describe_sources(plan)));
    out.push_str(&format!(
        "  score:        {} chord(s), {:.2} s\n",
        plan.score.chord_sequence.len(),
        plan.score.duration
    ));
    out.push_str(&format!(
        "  generator:    {}\n",
        plan.generator.kind.name()
    ));
    out.push_str(&format!(
        "  system:       {} ({} channels)\n",
        plan.bank.name,
        plan.bank.channels()
    ));
    out.push_str(&format!("  sample rate:  {} Hz\n", plan.sample_rate));
    out.push_str(&format!("  seed:         {}\n", plan.master_seed));
    out
}

pub fn print_dry_run(plan: &RenderPlan, out_path: Option<&Path>, encoding: &str) {
    println!("dry run — plan validated, nothing rendered");
    print!("{}", header(plan));
    for chord in plan.score.chord_sequence.chords() {
        let names: Vec<String> = chord.iter().map(|n| n.name()).collect();
        println!("  chord:        {}", names.join(","));
    }
    match out_path {
        Some(p) => println!("  would write:  {} ({encoding})", p.display()),
        None => println!("  would write:  (no output path set)"),
    }
}

pub fn print_report(plan: &RenderPlan, result: &RenderResult, out_path: &Path, encoding: &str) {
    println!("sonification report");
    print!("{}", header(plan));

    // Occupancy per note, in ascending pitch.
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for entry in &result.note_log {
        *counts.entry(entry.note.clone()).or_default() += 1;
    }
    let mut ordered: Vec<(String, usize)> = counts.into_iter().collect();
    ordered.sort_by(|a, b| {
        let fa = parse_note(&a.0).map(|n| n.frequency()).unwrap_or(0.0);
        let fb = parse_note(&b.0).map(|n| n.frequency()).unwrap_or(0.0);
        fa.total_cmp(&fb)
    });
    println!("  notes per chord bin:");
    for (note, count) in ordered {
        println!("    {note:<4} {count}");
    }

    println!("  clipped samples: {}", result.clip_count);
    println!(
        "  output: {} ({encoding}, {} channels, {} frames)",
        out_path.display(),
        result.audio.channels.len(),
        result.audio.frames()
    );
}

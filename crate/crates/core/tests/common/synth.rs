//! Deterministic synthetic visual programs of a requested length.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use abcd::corpus::{CorpusManifest, ManifestEntry};
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

const OBJECTS: &[&str] = &["person", "car", "dog", "cup", "door", "knife", "ball"];
const QUESTIONS: &[&str] = &[
    "What is this person doing?",
    "Is anyone in danger here?",
    "What's happening in the scene",
    "Who is the main character?",
    "Does the person look angry or upset?",
    "Is there any negative event happening in the scene?",
    "Please describe his/her action in the scene",
];

struct Gen {
    rng: SplitMix64,
    out: String,
    lines: usize,
    counter: usize,
}

impl Gen {
    fn pick<'a>(&mut self, items: &[&'a str]) -> &'a str {
        items[(self.rng.next_u64() % items.len() as u64) as usize]
    }

    fn line(&mut self, indent: usize, text: &str) {
        let _ = writeln!(self.out, "{}{}", "    ".repeat(indent), text);
        self.lines += 1;
    }

    fn fresh(&mut self, stem: &str) -> String {
        self.counter += 1;
        format!("{stem}_{}", self.counter)
    }

    fn block(&mut self) {
        let q = self.pick(QUESTIONS).to_string();
        let obj = self.pick(OBJECTS).to_string();
        let var = self.fresh("query");
        let ans = self.fresh("answer");
        match self.rng.next_u64() % 4 {
            0 => {
                self.line(1, "for i, frame in enumerate(video_segment.frame_iterator()):");
                self.line(2, &format!("for patch in frame.find({obj:?}):"));
                self.line(3, "patch_id = video_segment.face_identify(patch)");
                self.line(3, "if patch_id is None:");
                self.line(4, "continue");
                self.line(3, &format!("{ans} = patch.simple_query({q:?})"));
                self.line(3, &format!("info[f\"{{i}} {obj}\"] = {ans}"));
            }
            1 => {
                self.line(1, &format!("{var} = f\"Is the {obj} related to '{{previous}}'?\""));
                self.line(1, "for frame in video_segment.frame_iterator():");
                self.line(2, &format!("{ans} = frame.llm_query({var}, to_yesno=True)"));
                self.line(2, &format!("if \"yes\" in {ans}.lower():"));
                self.line(3, &format!("info[\"{obj}\"] = info.get(\"{obj}\", 0) + 1"));
                self.line(2, "else:");
                self.line(3, "previous = frame.simple_query(\"What changed?\")");
            }
            2 => {
                self.line(1, &format!("{var} = {q:?}"));
                self.line(1, "count = 0");
                self.line(1, "while count < 3:");
                self.line(2, &format!("{ans} = first_frame.simple_query({var})"));
                self.line(2, "count += 1");
                self.line(2, &format!("if {ans} == \"no\" or count > 2 and not flags[{ans}]:"));
                self.line(3, "break");
            }
            _ => {
                let [x, y, z] = [0; 3].map(|_| self.rng.next_u64() % 10);
                self.line(1, &format!("scores = [{x}, {y}, {z}]"));
                self.line(1, "total = scores[0] * 2 + scores[1] - scores[-1] // 3");
                self.line(
                    1,
                    "info[\"summary\"] = {\"total\": total, \"window\": scores[1:3], \"ok\": total >= 4}",
                );
                self.line(1, &format!("caption = first_frame.simple_query({q:?})"));
            }
        }
        self.line(1, "# end of step");
    }
}

/// A well-formed program of at least `lines` lines.
pub fn program(seed: u64, lines: usize) -> String {
    let mut g = Gen {
        rng: SplitMix64::seed_from_u64(seed),
        out: String::new(),
        lines: 0,
        counter: 0,
    };
    g.line(
        0,
        "def execute_command(video, annotation, possible_answers, query)->[str, str, dict]:",
    );
    g.line(1, "video_segment = VideoSegment(video, annotation)");
    g.line(1, "first_frame = video_segment.frame_iterator()[0]");
    g.line(1, "info = {}");
    g.line(1, "flags = {\"no\": True}");
    g.line(1, "previous = \"nothing\"");
    while g.lines + 2 < lines {
        g.block();
    }
    g.line(
        1,
        "answer, reason = video_segment.select_answer(info, query, possible_answers)",
    );
    g.line(1, "return answer, reason, info");
    g.out
}

/// A program that fails to parse, in one of several ways.
pub fn unparsable(seed: u64) -> String {
    let body = program(seed, 20);
    match seed % 4 {
        0 => body.replacen("def execute_command(video,", "def execute_command(video,,", 1),
        1 => body.replacen("    info = {}", "\tinfo = {}", 1),
        2 => body + "    squares = [x * x for x in range(3)]\n",
        _ => body + "    label = \"unterminated\n",
    }
}

/// Write `count` programs into `dir` and return a manifest over them.
/// Files whose index is in `bad` are unparsable.
pub fn write_corpus(dir: &Path, count: usize, lines: usize, datasets: &[&str], bad: &[usize]) -> CorpusManifest {
    let entries = (0..count)
        .map(|i| {
            let path: PathBuf = dir.join(format!("prog_{i:04}.vp"));
            let text = if bad.contains(&i) {
                unparsable(i as u64)
            } else {
                program(i as u64, lines)
            };
            std::fs::write(&path, text).unwrap();
            ManifestEntry {
                id: format!("p{i:04}"),
                path,
                dataset: datasets[i % datasets.len()].to_string(),
            }
        })
        .collect();
    CorpusManifest { entries, source: None }
}

//! Document ingestion and knowledge extraction.
//!
//! [`load_corpus`] reads a directory of UTF-8 text/markdown files into
//! [`SourceDocument`]s with stable lexicographic ordering. [`extract_knowledge`]
//! runs the extraction agent over one document and parses the completion
//! into the five-section distillate [`ExtractedKnowledge`].
//!
//! Wire format of an extraction completion: five level-2 markdown headers
//! (`## Terminological Description`, `## Example Information`,
//! `## System Model`, `## Optimization Formulation`,
//! `## Optimization Algorithm`), each optionally followed by a line
//! `Keywords: a; b; c`, then the section body. Headers match
//! case-insensitively and unknown level-2 sections are ignored.

use crate::graph::Layer;
use crate::prompts::PromptSet;
use crate::providers::{ChatProvider, ProviderError};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Documents longer than this are truncated (on a char boundary) before
/// they are handed to the extraction agent.
pub const DEFAULT_MAX_DOCUMENT_CHARS: usize = 20_000;

/// Retries after a malformed extraction completion, each with an appended
/// corrective instruction.
const MALFORMED_RETRIES: u32 = 1;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus directory {0} does not exist or is not a directory")]
    MissingDirectory(PathBuf),

    #[error("corpus directory {0} contains no readable text documents")]
    EmptyCorpus(PathBuf),

    #[error("cannot read corpus file {path}: {reason}")]
    UnreadableFile { path: PathBuf, reason: String },

    /// The extraction completion was missing (or had empty) sections after
    /// all retries. Carries the raw completion for diagnosis.
    #[error("malformed completion: missing or empty section(s) {missing:?}")]
    MalformedCompletion { missing: Vec<String>, raw: String },

    #[error(transparent)]
    Provider(#[from] ProviderError),
}

/// One raw input document.
#[derive(Debug, Clone)]
pub struct SourceDocument {
    /// Relative path within the corpus directory, with `/` separators.
    pub doc_id: String,
    pub title: String,
    pub body: String,
    pub origin_path: PathBuf,
}

/// The five canonical sections of an extraction completion, in wire order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Section {
    TerminologicalDescription,
    ExampleInformation,
    SystemModel,
    OptimizationFormulation,
    OptimizationAlgorithm,
}

impl Section {
    pub const ALL: [Section; 5] = [
        Section::TerminologicalDescription,
        Section::ExampleInformation,
        Section::SystemModel,
        Section::OptimizationFormulation,
        Section::OptimizationAlgorithm,
    ];

    pub fn header(self) -> &'static str {
        match self {
            Section::TerminologicalDescription => "Terminological Description",
            Section::ExampleInformation => "Example Information",
            Section::SystemModel => "System Model",
            Section::OptimizationFormulation => "Optimization Formulation",
            Section::OptimizationAlgorithm => "Optimization Algorithm",
        }
    }

    fn from_header(text: &str) -> Option<Section> {
        let normalized = text.trim().to_ascii_lowercase();
        Section::ALL
            .into_iter()
            .find(|section| section.header().to_ascii_lowercase() == normalized)
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.header())
    }
}

/// Raw parse of a five-section completion: body text plus the optional
/// keyword list per section.
#[derive(Debug, Clone, Default)]
pub struct ParsedSections {
    texts: [String; 5],
    keywords: [Vec<String>; 5],
}

impl ParsedSections {
    pub fn text(&self, section: Section) -> &str {
        &self.texts[section.index()]
    }

    pub fn keywords(&self, section: Section) -> &[String] {
        &self.keywords[section.index()]
    }
}

/// The five-section distillate of one source document, plus per-layer
/// keyword phrases (Terminological Description and Example Information
/// jointly feed the Problem Type layer).
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedKnowledge {
    pub doc_id: String,
    pub terminological_description: String,
    pub example_information: String,
    pub system_model: String,
    pub optimization_formulation: String,
    pub optimization_algorithm: String,
    /// Exactly four entries, one per graph layer.
    pub keywords_per_section: BTreeMap<Layer, Vec<String>>,
}

impl ExtractedKnowledge {
    pub fn section_text(&self, section: Section) -> &str {
        match section {
            Section::TerminologicalDescription => &self.terminological_description,
            Section::ExampleInformation => &self.example_information,
            Section::SystemModel => &self.system_model,
            Section::OptimizationFormulation => &self.optimization_formulation,
            Section::OptimizationAlgorithm => &self.optimization_algorithm,
        }
    }

    /// Node content for one layer. The Problem Type node carries the
    /// terminological description together with the example information.
    pub fn layer_content(&self, layer: Layer) -> String {
        match layer {
            Layer::ProblemType => format!(
                "{}\n\n{}",
                self.terminological_description, self.example_information
            ),
            Layer::SystemModel => self.system_model.clone(),
            Layer::OptimizationFormulation => self.optimization_formulation.clone(),
            Layer::OptimizationAlgorithm => self.optimization_algorithm.clone(),
        }
    }

    /// Keyword phrases for one layer, joined with `"; "` for embedding.
    pub fn layer_keywords(&self, layer: Layer) -> String {
        self.keywords_per_section
            .get(&layer)
            .map(|phrases| phrases.join("; "))
            .unwrap_or_default()
    }

    /// Renders the delimited wire format (the inverse of [`parse_sections`]).
    pub fn render(&self) -> String {
        let mut out = String::new();
        for section in Section::ALL {
            out.push_str("## ");
            out.push_str(section.header());
            out.push('\n');
            if let Some(layer) = keyword_layer(section) {
                let keywords = self.layer_keywords(layer);
                if !keywords.is_empty() {
                    out.push_str("Keywords: ");
                    out.push_str(&keywords);
                    out.push('\n');
                }
            }
            out.push_str(self.section_text(section));
            out.push_str("\n\n");
        }
        out
    }
}

/// The section whose `Keywords:` line feeds each layer on render. Example
/// Information keywords are merged into the Problem Type entry at parse
/// time, so only the other four sections emit a keywords line.
fn keyword_layer(section: Section) -> Option<Layer> {
    match section {
        Section::TerminologicalDescription => Some(Layer::ProblemType),
        Section::ExampleInformation => None,
        Section::SystemModel => Some(Layer::SystemModel),
        Section::OptimizationFormulation => Some(Layer::OptimizationFormulation),
        Section::OptimizationAlgorithm => Some(Layer::OptimizationAlgorithm),
    }
}

const TEXT_EXTENSIONS: [&str; 4] = ["md", "markdown", "txt", "text"];

/// Loads every text/markdown file under `directory` (recursively) in
/// lexicographic order of relative path.
pub fn load_corpus(directory: &Path) -> Result<Vec<SourceDocument>, CorpusError> {
    if !directory.is_dir() {
        return Err(CorpusError::MissingDirectory(directory.to_path_buf()));
    }
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in walkdir::WalkDir::new(directory).follow_links(true) {
        let entry = entry.map_err(|e| CorpusError::UnreadableFile {
            path: e.path().map(Path::to_path_buf).unwrap_or_default(),
            reason: e.to_string(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let is_text = entry
            .path()
            .extension()
            .and_then(|ext| ext.to_str())
            .map(|ext| TEXT_EXTENSIONS.contains(&ext.to_ascii_lowercase().as_str()))
            .unwrap_or(false);
        if is_text {
            paths.push(entry.into_path());
        }
    }
    if paths.is_empty() {
        return Err(CorpusError::EmptyCorpus(directory.to_path_buf()));
    }

    let mut documents = Vec::with_capacity(paths.len());
    for path in paths {
        let relative = path
            .strip_prefix(directory)
            .unwrap_or(&path)
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        if relative.contains(['#', '\t', '\n']) {
            return Err(CorpusError::UnreadableFile {
                path: path.clone(),
                reason: "file name may not contain '#', tab, or newline".into(),
            });
        }
        let body = std::fs::read_to_string(&path).map_err(|e| CorpusError::UnreadableFile {
            path: path.clone(),
            reason: e.to_string(),
        })?;
        if body.trim().is_empty() {
            return Err(CorpusError::UnreadableFile {
                path: path.clone(),
                reason: "file is empty".into(),
            });
        }
        let title = body
            .lines()
            .find_map(|line| line.strip_prefix("# ").map(|t| t.trim().to_string()))
            .unwrap_or_else(|| {
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| relative.clone())
            });
        documents.push(SourceDocument {
            doc_id: relative,
            title,
            body,
            origin_path: path,
        });
    }
    documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    Ok(documents)
}

/// Parses a completion into the five canonical sections.
///
/// Tolerates leading/trailing whitespace, header case, preamble text
/// before the first header, and unknown level-2 sections (ignored).
/// Missing or empty canonical sections produce
/// [`CorpusError::MalformedCompletion`] naming them.
pub fn parse_sections(completion: &str) -> Result<ParsedSections, CorpusError> {
    let mut bodies: [Vec<&str>; 5] = Default::default();
    let mut seen = [false; 5];
    let mut current: Option<usize> = None;

    for line in completion.lines() {
        let trimmed = line.trim();
        if let Some(header) = level2_header(trimmed) {
            match Section::from_header(header) {
                Some(section) => {
                    seen[section.index()] = true;
                    current = Some(section.index());
                }
                None => current = None,
            }
            continue;
        }
        if let Some(index) = current {
            bodies[index].push(line);
        }
    }

    let mut parsed = ParsedSections::default();
    let mut missing = Vec::new();
    for section in Section::ALL {
        let index = section.index();
        let mut lines = bodies[index].as_slice();
        // The optional keywords line is the first non-blank line of a section.
        while let Some((first, rest)) = lines.split_first() {
            if first.trim().is_empty() {
                lines = rest;
                continue;
            }
            if let Some(list) = keywords_line(first) {
                parsed.keywords[index] = list;
                lines = rest;
            }
            break;
        }
        let text = lines.join("\n").trim().to_string();
        if !seen[index] || text.is_empty() {
            missing.push(section.header().to_string());
        }
        parsed.texts[index] = text;
    }

    if missing.is_empty() {
        Ok(parsed)
    } else {
        Err(CorpusError::MalformedCompletion {
            missing,
            raw: completion.to_string(),
        })
    }
}

/// Strips a level-2 markdown header marker, rejecting deeper levels.
fn level2_header(line: &str) -> Option<&str> {
    let rest = line.strip_prefix("##")?;
    if rest.starts_with('#') {
        return None;
    }
    Some(rest.trim())
}

fn keywords_line(line: &str) -> Option<Vec<String>> {
    let trimmed = line.trim();
    let lower = trimmed.to_ascii_lowercase();
    let rest = lower.strip_prefix("keywords:")?;
    let offset = trimmed.len() - rest.len();
    let phrases: Vec<String> = trimmed[offset..]
        .split(';')
        .map(|phrase| phrase.trim().to_string())
        .filter(|phrase| !phrase.is_empty())
        .collect();
    Some(phrases)
}

/// First non-empty line of a section, truncated, as the fallback keyword
/// phrase when the completion carried no `Keywords:` line.
fn fallback_phrase(text: &str) -> Vec<String> {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("unspecified");
    vec![line.chars().take(80).collect()]
}

/// Options for [`extract_knowledge`].
#[derive(Debug, Clone)]
pub struct ExtractionOptions {
    pub max_document_chars: usize,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        Self {
            max_document_chars: DEFAULT_MAX_DOCUMENT_CHARS,
        }
    }
}

/// Runs the extraction agent over one document and assembles the
/// five-section distillate. A malformed completion triggers one retry with
/// an appended corrective instruction before failing.
pub fn extract_knowledge(
    doc: &SourceDocument,
    chat: &dyn ChatProvider,
    prompts: &PromptSet,
    options: &ExtractionOptions,
) -> Result<ExtractedKnowledge, CorpusError> {
    let truncated: String = doc.body.chars().take(options.max_document_chars).collect();
    let base_user = prompts.extraction.render_user(&[("document", &truncated)]);

    let mut attempt = 0u32;
    let mut corrective: Option<String> = None;
    let parsed = loop {
        let user = match &corrective {
            None => base_user.clone(),
            Some(missing) => format!(
                "{base_user}\n\nYour previous response was missing or left empty \
                 the required section(s): {missing}. Respond again with exactly \
                 the five required '##' headers, each non-empty."
            ),
        };
        let request = crate::providers::ChatRequest::new(prompts.extraction.system.clone(), user)
            .with_temperature(prompts.extraction.temperature)
            .with_max_output(prompts.extraction.max_output);
        let completion = chat.chat(&request)?;
        match parse_sections(&completion) {
            Ok(parsed) => break parsed,
            Err(CorpusError::MalformedCompletion { missing, .. })
                if attempt < MALFORMED_RETRIES =>
            {
                corrective = Some(missing.join(", "));
                attempt += 1;
            }
            Err(err) => return Err(err),
        }
    };

    Ok(assemble(doc.doc_id.clone(), parsed))
}

fn assemble(doc_id: String, parsed: ParsedSections) -> ExtractedKnowledge {
    // Problem Type keywords merge the terminological-description and
    // example-information lists, preserving order and dropping duplicates.
    let mut pt_keywords: Vec<String> = Vec::new();
    for phrase in parsed
        .keywords(Section::TerminologicalDescription)
        .iter()
        .chain(parsed.keywords(Section::ExampleInformation))
    {
        if !pt_keywords.contains(phrase) {
            pt_keywords.push(phrase.clone());
        }
    }
    if pt_keywords.is_empty() {
        pt_keywords = fallback_phrase(parsed.text(Section::TerminologicalDescription));
    }

    let layer_list = |section: Section| {
        let listed = parsed.keywords(section);
        if listed.is_empty() {
            fallback_phrase(parsed.text(section))
        } else {
            listed.to_vec()
        }
    };

    let mut keywords_per_section = BTreeMap::new();
    keywords_per_section.insert(Layer::ProblemType, pt_keywords);
    keywords_per_section.insert(Layer::SystemModel, layer_list(Section::SystemModel));
    keywords_per_section.insert(
        Layer::OptimizationFormulation,
        layer_list(Section::OptimizationFormulation),
    );
    keywords_per_section.insert(
        Layer::OptimizationAlgorithm,
        layer_list(Section::OptimizationAlgorithm),
    );

    ExtractedKnowledge {
        doc_id,
        terminological_description: parsed.text(Section::TerminologicalDescription).to_string(),
        example_information: parsed.text(Section::ExampleInformation).to_string(),
        system_model: parsed.text(Section::SystemModel).to_string(),
        optimization_formulation: parsed.text(Section::OptimizationFormulation).to_string(),
        optimization_algorithm: parsed.text(Section::OptimizationAlgorithm).to_string(),
        keywords_per_section,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::ScriptedChat;
    use std::fs;

    pub(crate) const WELL_FORMED: &str = "\
## Terminological Description
Keywords: narrowband DOA estimation; uniform linear array
Direction-of-arrival estimation with a uniform linear array.

## Example Information
Eight sensors at half-wavelength spacing, two far-field sources.

## System Model
Keywords: array manifold; additive white noise
x(t) = A(theta) s(t) + n(t).

## Optimization Formulation
Keywords: subspace fitting; least squares
Minimize the projection residual onto the signal subspace.

## Optimization Algorithm
Keywords: eigendecomposition; spectral peak search
Eigendecompose the sample covariance and search the pseudospectrum.
";

    fn doc() -> SourceDocument {
        SourceDocument {
            doc_id: "doa.md".into(),
            title: "DOA".into(),
            body: "estimating arrival angles with an antenna array".into(),
            origin_path: PathBuf::from("doa.md"),
        }
    }

    #[test]
    fn parses_minimal_five_section_completion() {
        let completion = "## Terminological Description\nA\n## Example Information\nB\n## System Model\nC\n## Optimization Formulation\nD\n## Optimization Algorithm\nE\n";
        let parsed = parse_sections(completion).unwrap();
        assert_eq!(parsed.text(Section::TerminologicalDescription), "A");
        assert_eq!(parsed.text(Section::OptimizationAlgorithm), "E");
    }

    #[test]
    fn headers_match_case_insensitively_with_whitespace() {
        let completion = "  ##   terminological description  \nA\n## EXAMPLE INFORMATION\nB\n## system model\nC\n## Optimization FORMULATION\nD\n## optimization algorithm\nE";
        let parsed = parse_sections(completion).unwrap();
        assert_eq!(parsed.text(Section::SystemModel), "C");
    }

    #[test]
    fn unknown_sixth_section_is_ignored() {
        let completion = format!("{WELL_FORMED}\n## Commentary\nshould vanish\n");
        let parsed = parse_sections(&completion).unwrap();
        assert!(!parsed
            .text(Section::OptimizationAlgorithm)
            .contains("vanish"));
    }

    #[test]
    fn shuffled_sections_match_by_header_not_position() {
        let completion = "## Optimization Algorithm\nE\n## Terminological Description\nA\n## Optimization Formulation\nD\n## Example Information\nB\n## System Model\nC";
        let parsed = parse_sections(completion).unwrap();
        assert_eq!(parsed.text(Section::TerminologicalDescription), "A");
        assert_eq!(parsed.text(Section::ExampleInformation), "B");
        assert_eq!(parsed.text(Section::SystemModel), "C");
        assert_eq!(parsed.text(Section::OptimizationFormulation), "D");
        assert_eq!(parsed.text(Section::OptimizationAlgorithm), "E");
    }

    #[test]
    fn missing_header_is_named() {
        let completion = "## Terminological Description\nA\n## Example Information\nB\n## System Model\nC\n## Optimization Formulation\nD";
        let err = parse_sections(completion).unwrap_err();
        match err {
            CorpusError::MalformedCompletion { missing, .. } => {
                assert_eq!(missing, vec!["Optimization Algorithm".to_string()]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn level3_headers_stay_in_the_body() {
        let completion = "## Terminological Description\nA\n### detail\nmore\n## Example Information\nB\n## System Model\nC\n## Optimization Formulation\nD\n## Optimization Algorithm\nE";
        let parsed = parse_sections(completion).unwrap();
        assert_eq!(
            parsed.text(Section::TerminologicalDescription),
            "A\n### detail\nmore"
        );
    }

    #[test]
    fn keywords_lines_are_captured_per_section() {
        let parsed = parse_sections(WELL_FORMED).unwrap();
        assert_eq!(
            parsed.keywords(Section::TerminologicalDescription),
            &["narrowband DOA estimation", "uniform linear array"]
        );
        assert!(parsed.keywords(Section::ExampleInformation).is_empty());
    }

    #[test]
    fn extract_parses_scripted_completion() {
        let chat = ScriptedChat::new().with_entry("*", WELL_FORMED);
        let prompts = PromptSet::builtin();
        let ek = extract_knowledge(&doc(), &chat, &prompts, &ExtractionOptions::default()).unwrap();
        assert!(ek
            .terminological_description
            .starts_with("Direction-of-arrival"));
        assert_eq!(ek.keywords_per_section.len(), 4);
        assert_eq!(
            ek.layer_keywords(Layer::ProblemType),
            "narrowband DOA estimation; uniform linear array"
        );
    }

    #[test]
    fn malformed_completion_retries_once_then_fails() {
        let four_sections = "## Terminological Description\nA\n## Example Information\nB\n## System Model\nC\n## Optimization Formulation\nD";
        let chat = ScriptedChat::new().with_entry("*", four_sections);
        let prompts = PromptSet::builtin();
        let err =
            extract_knowledge(&doc(), &chat, &prompts, &ExtractionOptions::default()).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedCompletion { .. }));
        assert_eq!(chat.calls().len(), 2, "one retry after the malformed reply");
        assert!(
            chat.calls()[1].user_content.contains("previous response"),
            "retry carries the corrective instruction"
        );
    }

    #[test]
    fn malformed_then_well_formed_succeeds_on_retry() {
        // Only the retry request carries the corrective instruction, so
        // keying the good reply on it scripts a recovery sequence.
        let bad = "## Terminological Description\nonly one";
        let chat = ScriptedChat::new()
            .with_entry("Your previous response was missing", WELL_FORMED)
            .with_entry("*", bad);
        let prompts = PromptSet::builtin();
        let ek = extract_knowledge(&doc(), &chat, &prompts, &ExtractionOptions::default()).unwrap();
        assert_eq!(chat.calls().len(), 2);
        assert!(!ek.system_model.is_empty());
    }

    #[test]
    fn missing_keywords_fall_back_to_first_line() {
        let completion = "## Terminological Description\nBearing-only localization study.\n## Example Information\nB\n## System Model\nC\n## Optimization Formulation\nD\n## Optimization Algorithm\nE";
        let chat = ScriptedChat::new().with_entry("*", completion);
        let ek = extract_knowledge(
            &doc(),
            &chat,
            &PromptSet::builtin(),
            &ExtractionOptions::default(),
        )
        .unwrap();
        assert_eq!(
            ek.layer_keywords(Layer::ProblemType),
            "Bearing-only localization study."
        );
        assert_eq!(ek.layer_keywords(Layer::SystemModel), "C");
    }

    #[test]
    fn render_then_parse_reproduces_sections() {
        let chat = ScriptedChat::new().with_entry("*", WELL_FORMED);
        let ek = extract_knowledge(
            &doc(),
            &chat,
            &PromptSet::builtin(),
            &ExtractionOptions::default(),
        )
        .unwrap();
        let parsed = parse_sections(&ek.render()).unwrap();
        for section in Section::ALL {
            assert_eq!(parsed.text(section), ek.section_text(section));
        }
    }

    #[test]
    fn load_corpus_orders_documents_by_path() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.md"), "# B\nbody b").unwrap();
        fs::write(dir.path().join("a.md"), "# A\nbody a").unwrap();
        fs::write(dir.path().join("c.md"), "# C\nbody c").unwrap();
        let docs = load_corpus(dir.path()).unwrap();
        let ids: Vec<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
        assert_eq!(ids, ["a.md", "b.md", "c.md"]);
        assert_eq!(docs[0].title, "A");
    }

    #[test]
    fn empty_directory_is_an_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_corpus(dir.path()),
            Err(CorpusError::EmptyCorpus(_))
        ));
    }

    #[test]
    fn missing_directory_is_reported() {
        assert!(matches!(
            load_corpus(Path::new("/nonexistent/magrag-corpus")),
            Err(CorpusError::MissingDirectory(_))
        ));
    }

    #[test]
    fn nested_files_get_path_prefixed_ids() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("sub")).unwrap();
        fs::write(dir.path().join("sub/x.md"), "x body").unwrap();
        fs::write(dir.path().join("sub/y.md"), "y body").unwrap();
        fs::write(dir.path().join("top.md"), "top body").unwrap();
        let docs = load_corpus(dir.path()).unwrap();
        let ids: Vec<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
        assert_eq!(ids, ["sub/x.md", "sub/y.md", "top.md"]);
    }

    #[test]
    fn empty_file_is_unreadable() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("empty.md"), "  \n").unwrap();
        let err = load_corpus(dir.path()).unwrap_err();
        match err {
            CorpusError::UnreadableFile { path, .. } => {
                assert!(path.ends_with("empty.md"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn two_loads_yield_identical_sequences() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["m.md", "k.txt", "z.markdown"] {
            fs::write(dir.path().join(name), format!("body of {name}")).unwrap();
        }
        let first = load_corpus(dir.path()).unwrap();
        let second = load_corpus(dir.path()).unwrap();
        let ids = |docs: &[SourceDocument]| {
            docs.iter().map(|d| d.doc_id.clone()).collect::<Vec<_>>()
        };
        assert_eq!(ids(&first), ids(&second));
    }
}

//! HTML scraping: paragraph-like text, tables and links.

use ego_tree::NodeRef;
use scraper::{ElementRef, Html, Node};

use crate::docmodel::{DocId, Sentence};
use crate::nlp::{analyze_sentence, Gazetteer};

use super::segment::segment_sentences;
use super::table::{CellSpan, Emphasis, TableGrid};
use super::IngestError;

/// Everything harvested from one page.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HtmlContent {
    pub sentences: Vec<Sentence>,
    pub tables: Vec<TableGrid>,
    pub links: Vec<String>,
}

const SKIPPED: &[&str] = &["script", "style", "noscript", "template", "head", "svg"];
const HARVESTED: &[&str] = &["p", "h1", "h2", "h3", "h4", "h5", "h6", "li"];
const BLOCKISH: &[&str] = &[
    "p", "div", "br", "li", "ul", "ol", "h1", "h2", "h3", "h4", "h5", "h6", "tr", "td", "th", "table", "section",
    "article", "blockquote", "dd", "dt",
];

fn decode(payload: &[u8]) -> Result<String, IngestError> {
    // NUL bytes mean this is not markup at all
    if payload.contains(&0) {
        return Err(IngestError::MalformedMarkup("payload contains NUL bytes".into()));
    }
    Ok(String::from_utf8_lossy(payload).into_owned())
}

/// Visible text below `node`, whitespace-collapsed. Script/style content is
/// dropped; comments are not text nodes and never appear. Nested tables are
/// skipped when `skip_tables` is set.
fn collect_text(node: NodeRef<'_, Node>, skip_tables: bool, out: &mut String) {
    for child in node.children() {
        match child.value() {
            Node::Text(t) => out.push_str(t),
            Node::Element(e) => {
                let name = e.name();
                if SKIPPED.contains(&name) || (skip_tables && name == "table") {
                    continue;
                }
                let block = BLOCKISH.contains(&name);
                if block {
                    out.push(' ');
                }
                collect_text(child, skip_tables, out);
                if block {
                    out.push(' ');
                }
            }
            _ => {}
        }
    }
}

fn collapse(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn table_grid(table: ElementRef<'_>, doc_id: &DocId) -> TableGrid {
    let mut rows = Vec::new();
    let mut spans = Vec::new();
    let mut emphasis = Vec::new();
    let mut any_span = false;
    for tr in table.descendants().filter_map(ElementRef::wrap).filter(|e| e.value().name() == "tr") {
        // rows of nested tables belong to those tables
        let owner = tr.ancestors().filter_map(ElementRef::wrap).find(|a| a.value().name() == "table");
        if owner.map(|o| o.id()) != Some(table.id()) {
            continue;
        }
        let mut row = Vec::new();
        let mut row_spans = Vec::new();
        let mut row_emph = Vec::new();
        for cell in tr.children().filter_map(ElementRef::wrap) {
            let name = cell.value().name();
            if name != "td" && name != "th" {
                continue;
            }
            let mut text = String::new();
            collect_text(*cell, false, &mut text);
            row.push(collapse(&text));
            let attr = |a: &str| cell.value().attr(a).and_then(|v| v.trim().parse::<u32>().ok()).unwrap_or(1).max(1);
            let span = CellSpan(attr("rowspan"), attr("colspan"));
            any_span |= span != CellSpan(1, 1);
            row_spans.push(span);
            let bold_style = cell.value().attr("style").is_some_and(|s| s.replace(' ', "").contains("font-weight:bold"));
            let is_bold = bold_style
                || cell.descendants().filter_map(ElementRef::wrap).any(|e| matches!(e.value().name(), "b" | "strong"));
            row_emph.push(Emphasis { is_th: name == "th", is_bold });
        }
        rows.push(row);
        spans.push(row_spans);
        emphasis.push(row_emph);
    }
    TableGrid {
        doc_id: doc_id.clone(),
        rows,
        cell_spans: any_span.then_some(spans),
        emphasis: Some(emphasis),
    }
}

struct Walker<'a> {
    doc_id: &'a DocId,
    gaz: &'a Gazetteer,
    out: HtmlContent,
}

impl Walker<'_> {
    fn walk(&mut self, node: NodeRef<'_, Node>, in_harvest: bool) {
        let Some(elem) = ElementRef::wrap(node) else {
            for child in node.children() {
                self.walk(child, in_harvest);
            }
            return;
        };
        let name = elem.value().name();
        if SKIPPED.contains(&name) {
            return;
        }
        if name == "a" {
            if let Some(href) = elem.value().attr("href") {
                self.out.links.push(href.trim().to_owned());
            }
        }
        if name == "table" {
            self.out.tables.push(table_grid(elem, self.doc_id));
            // links inside tables still count
            for a in elem.descendants().filter_map(ElementRef::wrap).filter(|e| e.value().name() == "a") {
                if let Some(href) = a.value().attr("href") {
                    self.out.links.push(href.trim().to_owned());
                }
            }
            return;
        }
        let mut harvesting = in_harvest;
        if !in_harvest && HARVESTED.contains(&name) {
            let mut text = String::new();
            collect_text(node, true, &mut text);
            for sentence in segment_sentences(&collapse(&text)) {
                let ordinal = self.out.sentences.len() as u32;
                self.out.sentences.push(analyze_sentence(self.doc_id.clone(), ordinal, &sentence, self.gaz));
            }
            harvesting = true;
        }
        for child in node.children() {
            self.walk_child(child, harvesting);
        }
    }

    fn walk_child(&mut self, child: NodeRef<'_, Node>, in_harvest: bool) {
        if in_harvest {
            // text already harvested; only tables and links remain of interest
            if let Some(e) = ElementRef::wrap(child) {
                match e.value().name() {
                    "table" | "a" => return self.walk(child, true),
                    n if SKIPPED.contains(&n) => return,
                    _ => {}
                }
                for c in child.children() {
                    self.walk_child(c, true);
                }
            }
        } else {
            self.walk(child, false);
        }
    }
}

/// Harvests `<p>`, `<h1>`–`<h6>` and `<li>` text as sentences, each
/// `<table>` as a [`TableGrid`] and each `<a href>` as a link. Script, style
/// and comment content is discarded. Malformed markup is recovered the way a
/// browser would; only binary input is rejected.
pub fn parse_html(payload: &[u8], doc_id: &DocId, gaz: &Gazetteer) -> Result<HtmlContent, IngestError> {
    let text = decode(payload)?;
    let doc = Html::parse_document(&text);
    let mut walker = Walker { doc_id, gaz, out: HtmlContent::default() };
    walker.walk(doc.tree.root(), false);
    Ok(walker.out)
}

/// Only the tables of an HTML payload.
pub fn parse_html_tables(payload: &[u8], doc_id: &DocId) -> Result<Vec<TableGrid>, IngestError> {
    let text = decode(payload)?;
    let doc = Html::parse_document(&text);
    let tables = doc
        .tree
        .root()
        .descendants()
        .filter_map(ElementRef::wrap)
        .filter(|e| e.value().name() == "table")
        .filter(|e| !e.ancestors().filter_map(ElementRef::wrap).any(|a| a.value().name() == "table"))
        .map(|t| table_grid(t, doc_id))
        .collect();
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use scraper::Selector;

    fn parse(html: &str) -> HtmlContent {
        parse_html(html.as_bytes(), &DocId::new("D1"), &Gazetteer::builtin()).unwrap()
    }

    fn texts(c: &HtmlContent) -> Vec<&str> {
        c.sentences.iter().map(|s| s.text.as_str()).collect()
    }

    #[test]
    fn paragraph_and_link() {
        let c = parse(r#"<p>Cotton exports rose.</p><a href="u">x</a>"#);
        assert_eq!(texts(&c), ["Cotton exports rose."]);
        assert_eq!(c.links, ["u"]);
        assert!(c.tables.is_empty());
    }

    #[test]
    fn table_with_th_flags() {
        let c = parse("<table><tr><th>Year</th><th>Area</th></tr><tr><td>2016</td><td>1518</td></tr></table>");
        assert_eq!(c.tables.len(), 1);
        let t = &c.tables[0];
        assert_eq!(t.rows, vec![vec!["Year", "Area"], vec!["2016", "1518"]]);
        let emph = t.emphasis.as_ref().unwrap();
        assert!(emph[0].iter().all(|e| e.is_th));
        assert!(emph[1].iter().all(|e| !e.is_th));
        assert!(c.sentences.is_empty());
    }

    #[test]
    fn script_text_never_emitted() {
        let html = "<script>var a=1;</script><p>Hi there. Bye now.</p><!-- p>hidden</p --><style>p{}</style>";
        let c = parse(html);
        assert_eq!(texts(&c), ["Hi there.", "Bye now."]);

        // independent DOM walk: every <p> element's text, segmented
        let doc = Html::parse_document(html);
        let oracle: Vec<String> = doc
            .select(&Selector::parse("p").unwrap())
            .flat_map(|p| segment_sentences(&p.text().collect::<String>()))
            .collect();
        assert_eq!(texts(&c), oracle);
    }

    #[test]
    fn headings_lists_and_recovery() {
        let c = parse("<h2>Water use</h2><ul><li>Yield rose<li>Area fell</ul><p>Unclosed <b>bold text");
        assert_eq!(texts(&c), ["Water use", "Yield rose", "Area fell", "Unclosed bold text"]);
        let ords: Vec<u32> = c.sentences.iter().map(|s| s.ordinal).collect();
        assert_eq!(ords, [0, 1, 2, 3]);
    }

    #[test]
    fn spans_and_nested_tables() {
        let c = parse(
            r#"<table><tr><th rowspan="2">Region</th><th colspan="2"><b>Production</b></th></tr>
               <tr><th>Irrigated</th><th>Dryland</th></tr>
               <tr><td>NSW</td><td>1,200</td><td><table><tr><td>inner</td></tr></table></td></tr></table>"#,
        );
        assert_eq!(c.tables.len(), 1);
        let t = &c.tables[0];
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.cell_spans.as_ref().unwrap()[0], [CellSpan(2, 1), CellSpan(1, 2)]);
        assert!(t.emphasis.as_ref().unwrap()[0][1].is_bold);
    }

    #[test]
    fn binary_input_rejected() {
        assert!(matches!(
            parse_html(b"\x00\x01PK", &DocId::new("D"), &Gazetteer::builtin()),
            Err(IngestError::MalformedMarkup(_))
        ));
    }
}

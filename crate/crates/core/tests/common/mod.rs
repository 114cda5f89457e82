//! LaTeX fixtures shared by the parser tests and the acceptance run.
#![allow(dead_code)]

use scimine_core::latex::{parse_document, ParseOutput, SourceArchive, TableGrid};

pub const ID: &str = "2101.00001";

pub struct Fixture {
    pub name: &'static str,
    pub tex: &'static str,
    /// (caption, rows) per table, in document order.
    pub tables: &'static [(&'static str, &'static [&'static [&'static str]])],
}

pub fn wrap(body: &str) -> String {
    format!("\\documentclass{{article}}\n\\usepackage{{booktabs}}\n\\begin{{document}}\n{body}\n\\end{{document}}\n")
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "plain_hline",
        tex: r"\begin{table}\caption{Dev results}\begin{tabular}{lc}\hline System & F1 \\ \hline BERT & 92.2 \\ \hline\end{tabular}\end{table}",
        tables: &[("Dev results", &[&["System", "F1"], &["BERT", "92.2"]])],
    },
    Fixture {
        name: "booktabs",
        tex: "\\begin{table}\n\\centering\n\\begin{tabular}{lr}\n\\toprule\nModel & Acc \\\\\n\\midrule\nCNN & 88.1 \\\\\nLSTM & 89.4 \\\\\n\\bottomrule\n\\end{tabular}\n\\caption{Accuracy.}\n\\end{table}",
        tables: &[("Accuracy.", &[&["Model", "Acc"], &["CNN", "88.1"], &["LSTM", "89.4"]])],
    },
    Fixture {
        name: "multicolumn_header",
        tex: r"\begin{table}\caption{SQuAD}\begin{tabular}{lcc} & \multicolumn{2}{c}{SQuAD} \\ System & EM & F1 \\ Ours & 84.1 & 90.9 \end{tabular}\end{table}",
        tables: &[("SQuAD", &[&["", "SQuAD", "SQuAD"], &["System", "EM", "F1"], &["Ours", "84.1", "90.9"]])],
    },
    Fixture {
        name: "multirow",
        tex: r"\begin{table}\caption{Sizes}\begin{tabular}{llc}\multirow{2}{*}{BERT} & base & 84.6 \\ & large & 86.7 \\\end{tabular}\end{table}",
        tables: &[("Sizes", &[&["BERT", "base", "84.6"], &["BERT", "large", "86.7"]])],
    },
    Fixture {
        name: "nested_braces",
        tex: r"\begin{table}\caption{Braces}\begin{tabular}{ll}{\bf Model} & {\em F1 {\small (dev)}} \\ A & {{1.0}} \end{tabular}\end{table}",
        tables: &[("Braces", &[&["Model", "F1 (dev)"], &["A", "1.0"]])],
    },
    Fixture {
        name: "caption_after_tabular",
        tex: r"\begin{table}\begin{tabular}{ll} a & b \\ \end{tabular}\caption{Late caption}\end{table}",
        tables: &[("Late caption", &[&["a", "b"]])],
    },
    Fixture {
        name: "tabular_star",
        tex: r"\begin{table}\caption{Wide}\begin{tabular*}{\textwidth}{@{\extracolsep{\fill}}lr} Task & Score \\ NER & 91.0 \end{tabular*}\end{table}",
        tables: &[("Wide", &[&["Task", "Score"], &["NER", "91.0"]])],
    },
    Fixture {
        name: "subscripts",
        tex: r"\begin{table}\caption{Scripts}\begin{tabular}{lc} BERT$_{\textsc{base}}$ & 84.6 \\ GPT$^{2}$ & 80.1 \end{tabular}\end{table}",
        tables: &[("Scripts", &[&["BERTbase", "84.6"], &["GPT2", "80.1"]])],
    },
    Fixture {
        name: "citations",
        tex: r"\begin{table}\caption{Baselines}\begin{tabular}{lc} ELMo \cite{peters2018} & 71.2 \\ CoVe~\citep[p.~3]{mccann} & 70.9 \end{tabular}\end{table}",
        tables: &[("Baselines", &[&["ELMo", "71.2"], &["CoVe", "70.9"]])],
    },
    Fixture {
        name: "escaped_specials",
        tex: r"\begin{table}\caption{Escapes}\begin{tabular}{ll} Drop (\%) & Q\&A \\ 3.5\% & yes \end{tabular}\end{table}",
        tables: &[("Escapes", &[&["Drop (%)", "Q&A"], &["3.5%", "yes"]])],
    },
    Fixture {
        name: "two_tables",
        tex: "\\section{Results}\nSee below.\n\\begin{table}\\caption{First}\\begin{tabular}{ll} a & 1 \\end{tabular}\\end{table}\nAnd more.\n\\begin{table}\\caption{Second}\\begin{tabular}{ll} b & 2 \\end{tabular}\\end{table}",
        tables: &[("First", &[&["a", "1"]]), ("Second", &[&["b", "2"]])],
    },
    Fixture {
        name: "resizebox",
        tex: r"\begin{table}\caption{MT}\resizebox{\columnwidth}{!}{\begin{tabular}{lc} Model & BLEU \\ Transformer & 28.4 \end{tabular}}\end{table}",
        tables: &[("MT", &[&["Model", "BLEU"], &["Transformer", "28.4"]])],
    },
    Fixture {
        name: "ragged_rows",
        tex: r"\begin{table}\caption{Ragged}\begin{tabular}{lll} a & b & c \\ d \\ e & f \end{tabular}\end{table}",
        tables: &[("Ragged", &[&["a", "b", "c"], &["d", "", ""], &["e", "f", ""]])],
    },
    Fixture {
        name: "empty_cells",
        tex: r"\begin{table}\caption{Gaps}\begin{tabular}{lll} Model & & F1 \\ X & 1 & \\ \end{tabular}\end{table}",
        tables: &[("Gaps", &[&["Model", "", "F1"], &["X", "1", ""]])],
    },
    Fixture {
        name: "table_star",
        tex: r"\begin{table*}\caption{Full width}\begin{tabular}{lc} Setting & Value \\ lr & 3e-5 \end{tabular}\end{table*}",
        tables: &[("Full width", &[&["Setting", "Value"], &["lr", "3e-5"]])],
    },
    Fixture {
        name: "pm_and_dagger",
        tex: r"\begin{table}\caption{Variance}\begin{tabular}{ll} $84.6 \pm 0.3$ & $\dagger$ 12 \end{tabular}\end{table}",
        tables: &[("Variance", &[&["84.6±0.3", "† 12"]])],
    },
    Fixture {
        name: "commented_row",
        tex: "\\begin{table}\\caption{Comments}\n\\begin{tabular}{lc}\nA & 1 \\\\\n% B & 2 \\\\\nC & 3 \\\\\n\\end{tabular}\n\\end{table}",
        tables: &[("Comments", &[&["A", "1"], &["C", "3"]])],
    },
    Fixture {
        name: "cmidrule",
        tex: r"\begin{table}\caption{Test}\begin{tabular}{lcc}\toprule & \multicolumn{2}{c}{Test} \\ \cmidrule(lr){2-3} Model & P & R \\ \midrule M1 & 0.5 & 0.6 \\ \bottomrule\end{tabular}\end{table}",
        tables: &[("Test", &[&["", "Test", "Test"], &["Model", "P", "R"], &["M1", "0.5", "0.6"]])],
    },
    Fixture {
        name: "caption_with_markup",
        tex: r"\begin{table}\caption{Results on GLUE \cite{wang}. Best in \textbf{bold}.}\label{tab:glue}\begin{tabular}{lc} Task & Acc \\ RTE & 70.1 \end{tabular}\end{table}",
        tables: &[("Results on GLUE . Best in bold.", &[&["Task", "Acc"], &["RTE", "70.1"]])],
    },
    Fixture {
        name: "row_spacing",
        tex: r"\begin{sidewaystable}\caption{Spacing}\begin{tabular}{lc} A & 1 \\[2pt] B & 2 \end{tabular}\end{sidewaystable}",
        tables: &[("Spacing", &[&["A", "1"], &["B", "2"]])],
    },
    Fixture {
        name: "longtable_caption",
        tex: r"\begin{longtable}{ll}\caption{Long}\\ a & b \\ \end{longtable}",
        tables: &[("Long", &[&["a", "b"]])],
    },
    Fixture {
        name: "colors",
        tex: r"\begin{table}\caption{Colors}\begin{tabular}{lc} Model & F1 \\ \rowcolor{gray} Ours & \textcolor{red}{93.1} \end{tabular}\end{table}",
        tables: &[("Colors", &[&["Model", "F1"], &["Ours", "93.1"]])],
    },
    Fixture {
        name: "nested_tabular_cell",
        tex: r"\begin{table}\caption{Stacked}\begin{tabular}{lc}\begin{tabular}{c}Multi\\line\end{tabular} & x \\ y & z \end{tabular}\end{table}",
        tables: &[("Stacked", &[&["Multi line", "x"], &["y", "z"]])],
    },
    Fixture {
        name: "text_only",
        tex: "\\begin{abstract} We propose X. \\end{abstract}\n\\section{Introduction} We study parsing. \\subsection{Setup} Details follow.",
        tables: &[],
    },
];

pub fn parse_fixture(f: &Fixture) -> ParseOutput {
    let archive = SourceArchive::from_tex(ID, &wrap(f.tex)).unwrap_or_else(|e| panic!("{}: {e}", f.name));
    parse_document(&archive)
}

pub fn grid_strings(g: &TableGrid) -> Vec<Vec<String>> {
    (0..g.rows).map(|i| (0..g.cols).map(|j| g.cell_text(i, j)).collect()).collect()
}

import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from specweb.cli import main
from specweb.config import ConfigError, load_config

MISNEST = b"""<Document>
<P id="LinkTarget_1">7 Classes</P>
<P id="LinkTarget_2">7.3 Class Descriptions</P>
<P id="LinkTarget_3">7.3.1 Abstraction (from Dependencies)</P>
<P id="LinkTarget_4">7.3.2 Association (from Kernel)</P>
<P id="LinkTarget_5">7.4 Diagrams</P>
</Document>
"""


def write(tmp_path: Path, name: str, data: bytes | str) -> Path:
    p = tmp_path / name
    p.write_bytes(data if isinstance(data, bytes) else data.encode())
    return p


def tree_files(root: Path) -> dict[str, bytes]:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_extract_nests_sibling(tmp_path, capsys):
    src = write(tmp_path, "flat.xml", MISNEST)
    assert main(["extract", "-i", str(src)]) == 0
    out = capsys.readouterr().out
    assert out.index('<Section Number="7.3">') < out.index("</Section>") < out.index('<Section Number="7.4">')


def test_extract_empty_file(tmp_path, capsys):
    src = write(tmp_path, "empty.xml", b"")
    assert main(["extract", "-i", str(src)]) == 0
    assert capsys.readouterr().out.endswith("<Book/>\n")


def test_malformed_input_exit_3_with_line(tmp_path, capsys):
    src = write(tmp_path, "bad.xml", b"<Document>\n<P>ok</P>\n<P><Q></P>\n</Document>")
    assert main(["extract", "-i", str(src)]) == 3
    err = capsys.readouterr().err
    assert "bad.xml" in err and "line 3" in err


def test_duplicate_numbers_exit_1(tmp_path, capsys):
    src = write(tmp_path, "dup.xml", b'<Document><P id="LinkTarget_1">7 A</P><P id="LinkTarget_2">7 B</P></Document>')
    assert main(["extract", "-i", str(src)]) == 1
    assert "duplicate" in capsys.readouterr().err


def test_missing_input_exit_2(tmp_path, capsys):
    assert main(["extract", "-i", str(tmp_path / "nope.xml")]) == 2
    assert "nope.xml" in capsys.readouterr().err
    assert main(["extract"]) == 2


def test_render_page_counts(tmp_path, sample_spec):
    structured = tmp_path / "structured.xml"
    assert main(["extract", "-i", str(sample_spec), "-o", str(structured)]) == 0
    assert main(["render", "-i", str(structured), "-o", str(tmp_path / "site")]) == 0
    assert len(list((tmp_path / "site").rglob("*.html"))) == 24 + 1 + 9

    cfg = write(tmp_path, "no-concepts.ini", "[concepts]\nenabled = false\n")
    out = tmp_path / "plain"
    assert main(["render", "-i", str(structured), "-o", str(out), "-c", str(cfg)]) == 0
    assert len(list(out.rglob("*.html"))) == 24 + 1


def test_render_rerun_identical(tmp_path, sample_spec):
    structured = tmp_path / "s.xml"
    main(["extract", "-i", str(sample_spec), "-o", str(structured)])
    main(["render", "-i", str(structured), "-o", str(tmp_path / "a")])
    main(["render", "-i", str(structured), "-o", str(tmp_path / "b")])
    assert tree_files(tmp_path / "a") == tree_files(tmp_path / "b")


def test_pipeline_equals_staged_run(tmp_path, sample_spec, sample_dir):
    staged = tmp_path / "staged"
    structured = staged / "structured.xml"
    staged.mkdir()
    assert main(["extract", "-i", str(sample_spec), "-o", str(structured)]) == 0
    images = ["--images", str(sample_dir / "images")]
    assert main(["render", "-i", str(structured), "-o", str(staged), *images]) == 0
    assert main(["stats", "-i", str(structured), "-o", str(staged / "report.tsv"), "--name", "sample_spec"]) == 0

    piped = tmp_path / "piped"
    assert main(["pipeline", "-i", str(sample_spec), "-o", str(piped)]) == 0
    assert tree_files(piped) == tree_files(staged)


def test_pipeline_dry_run_writes_nothing(tmp_path, sample_spec, capsys):
    out = tmp_path / "out"
    assert main(["pipeline", "-i", str(sample_spec), "-o", str(out), "--dry-run"]) == 0
    assert not out.exists()
    assert "30 headings" in capsys.readouterr().out


def test_stats_min_occurrence(tmp_path, sample_spec, capsys):
    structured = tmp_path / "s.xml"
    main(["extract", "-i", str(sample_spec), "-o", str(structured)])
    capsys.readouterr()
    assert main(["stats", "-i", str(structured), "--min-occurrence", "2"]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert dict(zip(header.split("\t"), row.split("\t")))["mode"] == ">2"


def test_concepts_and_crossref_listings(tmp_path, sample_spec, capsys):
    structured = tmp_path / "s.xml"
    main(["extract", "-i", str(sample_spec), "-o", str(structured)])
    capsys.readouterr()
    assert main(["concepts", "-i", str(structured)]) == 0
    listing = capsys.readouterr().out
    assert "CompleteActions\tAcceptCallAction\t12.2.1.html\tActions" in listing
    assert "\nActions\tAcceptCallAction" not in listing
    assert main(["crossref", "-i", str(structured)]) == 0
    assert 'AssociationClass@<a href="7.3.3.html">AssociationClass</a>' in capsys.readouterr().out


def test_config_file_and_flag_precedence(tmp_path, capsys):
    src = write(tmp_path, "flat.xml", b'<Document><P id="H_1">7 Classes</P><P id="LinkTarget_2">8 Other</P></Document>')
    cfg = write(tmp_path, "run.ini", f"[paths]\ninput = {src}\n[ingest]\nmarker = H_\n")
    assert main(["extract", "-c", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert 'Number="7"' in out and 'Number="8"' not in out
    assert main(["extract", "-c", str(cfg), "--marker", "LinkTarget"]) == 0
    out = capsys.readouterr().out
    assert 'Number="8"' in out and 'Number="7"' not in out


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "a.ini", "[stats]\nmin_occurrence = lots\n"))
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "b.ini", "not an ini file"))
    cfg = load_config(write(tmp_path, "c.ini", "[concepts]\npackages = Actions, CompleteActions\n[stats]\nstopwords = the, A\n"))
    assert cfg.packages == ("Actions", "CompleteActions")
    assert cfg.tokenizer.stopwords == {"the", "a"}


def test_module_entry_point(tmp_path):
    src = write(tmp_path, "flat.xml", MISNEST)
    proc = subprocess.run([sys.executable, "-m", "specweb", "extract", "-i", str(src)], capture_output=True, text=True)
    assert proc.returncode == 0 and "<Book>" in proc.stdout


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(
    st.lists(
        st.sampled_from(
            ["<P>", "</P>", '<P id="LinkTarget_1">', "7 Classes", "7.1 A", "Part I - X", "Annex", "<", ">", "&",
             "<Figure>", "</Figure>", '<ImageData src="i.png"/>', "<L>", "<LI>", "</LI>", "</L>", "<TR>", "\n", "\x00", "é"]
        ),
        max_size=30,
    )
)
def test_fuzz_only_structured_errors(tmp_path, capsys, pieces):
    src = write(tmp_path, "fuzz.xml", "".join(pieces))
    code = main(["extract", "-i", str(src), "-o", str(tmp_path / "out.xml")])
    assert code in (0, 1, 3)
    capsys.readouterr()


def test_check_subcommand(tmp_path, sample_spec, capsys):
    out = tmp_path / "site"
    assert main(["pipeline", "-i", str(sample_spec), "-o", str(out)]) == 0
    capsys.readouterr()
    assert main(["check", "-i", str(out)]) == 0
    assert "34 pages" in capsys.readouterr().out
    (out / "7.html").write_text("<html><body><a href='gone.html'>x</a></body></html>")
    assert main(["check", "-i", str(out)]) == 1
    assert main(["check", "-i", str(out / "missing")]) == 2

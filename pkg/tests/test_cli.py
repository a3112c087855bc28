"""CLI exit codes, stage composition and report delegation."""

import json

import pytest

from migmine.cli import main
from migmine.store import Store


def run_cli(*argv):
    return main([str(a) for a in argv])


def common_flags(corpus, workdir, *, db=None):
    return [
        "--workdir", workdir,
        "--db", db or workdir / "m.db",
        "--repo-base", corpus.repo_base,
    ]


class TestUsageErrors:
    def test_missing_projects_file_is_exit_1(self, tmp_path):
        assert run_cli("run", "--projects", tmp_path / "missing.txt", "--workdir", tmp_path) == 1

    def test_empty_project_list_is_exit_1(self, tmp_path):
        empty = tmp_path / "projects.txt"
        empty.write_text("# nothing here\n")
        assert run_cli("run", "--projects", empty, "--workdir", tmp_path) == 1

    def test_bad_flag_value_is_exit_1(self, tmp_path):
        projects = tmp_path / "projects.txt"
        projects.write_text("x\n")
        assert (
            run_cli("run", "--projects", projects, "--workdir", tmp_path, "--t-rel", "1.5")
            == 1
        )

    def test_unknown_flag_is_exit_1(self):
        with pytest.raises(SystemExit) as err:
            run_cli("run", "--definitely-not-a-flag")
        assert err.value.code == 1

    def test_stage_before_ingest_is_exit_1(self, tmp_path):
        assert run_cli("detect-rules", "--workdir", tmp_path) == 1

    def test_segments_before_rules_is_exit_1(self, corpus, tmp_path):
        assert run_cli("ingest", "--projects", corpus.projects_file,
                       *common_flags(corpus, tmp_path)) == 0
        assert run_cli("detect-segments", *common_flags(corpus, tmp_path)) == 1


class TestStagedPipeline:
    def test_stage_sequence_matches_run_all(self, corpus, tmp_path):
        staged = tmp_path / "staged"
        full = tmp_path / "full"
        staged.mkdir(), full.mkdir()

        assert run_cli("ingest", "--projects", corpus.projects_file,
                       *common_flags(corpus, staged)) == 0
        for stage in ("detect-rules", "detect-segments", "detect-fragments", "collect-docs"):
            assert run_cli(stage, *common_flags(corpus, staged)) == 0

        assert run_cli("run", "--projects", corpus.projects_file,
                       *common_flags(corpus, full)) == 0

        with Store(staged / "m.db") as a, Store(full / "m.db") as b:
            for selector in ("rules", "segments", "fragments", "mappings"):
                assert a.export("json", selector) == b.export("json", selector)

    def test_report_delegates_to_store_export(self, corpus, tmp_path, capsys):
        flags = common_flags(corpus, tmp_path)
        assert run_cli("ingest", "--projects", corpus.projects_file, *flags) == 0
        assert run_cli("detect-rules", *flags) == 0
        assert run_cli("report", "--select", "rules", "--format", "json", "--stdout", *flags) == 0
        printed = capsys.readouterr().out
        with Store(tmp_path / "m.db") as store:
            assert printed.encode() == store.export("json", "rules")

    def test_report_to_file(self, corpus, tmp_path):
        flags = common_flags(corpus, tmp_path)
        run_cli("ingest", "--projects", corpus.projects_file, *flags)
        run_cli("detect-rules", *flags)
        out = tmp_path / "rules.csv"
        assert run_cli("report", "--select", "rules", "--format", "csv", "--out", out, *flags) == 0
        assert out.read_text().startswith("source,target,")

    def test_rerun_detect_rules_with_lower_threshold(self, corpus, tmp_path):
        flags = common_flags(corpus, tmp_path)
        assert run_cli("ingest", "--projects", corpus.projects_file, *flags) == 0
        assert run_cli("detect-rules", *flags) == 0
        with Store(tmp_path / "m.db") as store:
            strict = {(r.source, r.target) for r in store.rules()}
        # recompute without re-ingesting: clone dirs untouched, commits kept
        assert run_cli("detect-rules", "--t-rel", "0.5", *flags) == 0
        with Store(tmp_path / "m.db") as store:
            relaxed = {(r.source, r.target) for r in store.rules()}
            assert store.has_commits()
        assert strict <= relaxed

    def test_partial_failure_is_exit_2(self, corpus, tmp_path):
        mixed = tmp_path / "projects.txt"
        good = corpus.root / "repos" / "mig-single"
        mixed.write_text(f"{good}\n{tmp_path / 'no-such-repo'}\n")
        code = run_cli("run", "--projects", mixed, *common_flags(corpus, tmp_path))
        assert code == 2
        with Store(tmp_path / "m.db") as store:
            assert [p.id for p in store.projects()] == ["mig-single"]

    def test_ingest_partial_failure_is_exit_2(self, corpus, tmp_path):
        mixed = tmp_path / "projects.txt"
        good = corpus.root / "repos" / "mig-single"
        mixed.write_text(f"{good}\n{tmp_path / 'gone'}\n")
        assert run_cli("ingest", "--projects", mixed, *common_flags(corpus, tmp_path)) == 2

    def test_offline_cold_cache_completes(self, corpus, tmp_path):
        code = run_cli(
            "run", "--projects", corpus.projects_file,
            "--workdir", tmp_path, "--db", tmp_path / "m.db",
            "--offline",
        )
        assert code == 0
        with Store(tmp_path / "m.db") as store:
            counts = store.counts()
        # indexes degrade to prefix guesses: gson packages are invisible,
        # no fragments confirm, and the docs stage attaches nothing
        assert counts["docs_attached"] == 0

    def test_rerun_same_database_is_stable(self, corpus, tmp_path):
        """Re-running `run` over the same workdir and db replaces, never
        duplicates: exports stay byte-identical."""
        flags = common_flags(corpus, tmp_path)
        assert run_cli("run", "--projects", corpus.projects_file, *flags) == 0
        with Store(tmp_path / "m.db") as store:
            first = {
                sel: store.export("json", sel)
                for sel in ("rules", "segments", "fragments", "mappings")
            }
        assert run_cli("run", "--projects", corpus.projects_file, *flags) == 0
        with Store(tmp_path / "m.db") as store:
            for sel, payload in first.items():
                assert store.export("json", sel) == payload

    def test_no_fallback_index_fails_segments(self, corpus, tmp_path):
        flags = [
            "--workdir", tmp_path, "--db", tmp_path / "m.db",
            "--repo-base", "file:///nowhere",  # all archive fetches miss
        ]
        assert run_cli("ingest", "--projects", corpus.projects_file, *flags) == 0
        assert run_cli("detect-rules", *flags) == 0
        assert run_cli("detect-segments", "--no-fallback-index", *flags) == 1

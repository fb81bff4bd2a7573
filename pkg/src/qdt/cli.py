"""Command-line interface: ``qdt <command> ...``.

Exit status is 0 on success, 1 when some input fails validation and 2 on
usage or I/O errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .core import InnerQuestion, QdtTree, QuestionNode, depth, parse_linear, tokenize, validate
from .corruption import CorruptionRates, generate_training_set
from .dataset import load_dataset, stats
from .decipher import decipher_detailed
from .errors import InvalidMerge, QdtError, QdtParseError
from .metrics import answer_set_metrics, evaluate_sequences, evaluate_trees, EvalReport
from .scorers import make_scorer
from .sexpr import EntityLabelMap, denormalize, load_relation_vocab, normalize, parse_sexpr, to_text

log = logging.getLogger("qdt")


class UsageError(Exception):
    pass


def _read_lines(path: str) -> list[str]:
    if path == "-":
        return [line.rstrip("\n") for line in sys.stdin]
    try:
        with open(path, encoding="utf-8") as f:
            return [line.rstrip("\n") for line in f]
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e


def _qdt_lines(path: str) -> list[str]:
    """Linearized QDTs, one per line; JSON records contribute their ``qdt`` field."""
    out = []
    for line in _read_lines(path):
        stripped = line.strip()
        if stripped.startswith("{"):
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError:
                obj = None
            if isinstance(obj, dict) and "qdt" in obj:
                out.append(obj["qdt"])
                continue
        out.append(line)
    return out


class _Output:
    def __init__(self, path: str | None):
        self.path = path
        self.lines: list[str] = []

    def write(self, line: str):
        self.lines.append(line)

    def close(self):
        text = "".join(line + "\n" for line in self.lines)
        if self.path and self.path != "-":
            Path(self.path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)


def _tree_json(tree: QdtTree) -> dict:
    def question(q: QuestionNode) -> dict:
        descs = []
        for d in q.descriptions:
            segs = []
            for s in d.segments:
                if isinstance(s, InnerQuestion):
                    segs.append({"inner": question(s.question)})
                else:
                    segs.append({"text": " ".join(s.words)})
            descs.append({"segments": segs})
        return {"descriptions": descs}

    return {"depth": depth(tree), "root": question(tree.root)}


def _report(report: EvalReport, out_path: str | None) -> None:
    for line in report.lines():
        print(line)
    if out_path:
        Path(out_path).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_parse(args) -> int:
    out = _Output(args.out)
    status = 0
    for n, line in enumerate(_qdt_lines(args.input), 1):
        try:
            out.write(json.dumps(_tree_json(parse_linear(line)), ensure_ascii=False))
        except QdtParseError as e:
            status = 1
            print(f"line {n}: {type(e).__name__}: {e} (token {e.token_index})", file=sys.stderr)
            out.write(json.dumps({"error": type(e).__name__, "message": str(e),
                                  "token_index": e.token_index}))
    out.close()
    return status


def cmd_validate(args) -> int:
    lines = _read_lines(args.input)
    failures = 0
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        original = None
        qdt = line
        if line.lstrip().startswith("{"):
            try:
                obj = json.loads(line)
                qdt, original = obj["qdt"], obj.get("question")
            except (json.JSONDecodeError, KeyError, TypeError):
                failures += 1
                print(f"line {n}: unreadable record", file=sys.stderr)
                continue
        report = validate(qdt, original, case_sensitive=not args.ignore_case)
        for issue in report.issues:
            print(f"line {n}: {issue.severity}: {issue.code}: {issue.message}"
                  + (f" (token {issue.token_index})" if issue.token_index is not None else ""),
                  file=sys.stderr)
        failures += not report.valid
    print(f"{len([l for l in lines if l.strip()]) - failures} valid, {failures} invalid")
    return 1 if failures else 0


def cmd_decipher(args) -> int:
    rows = []
    for n, line in enumerate(_read_lines(args.clues), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise UsageError(f"{args.clues}:{n}: expected 'question<TAB>clue'")
        rows.append(parts)
    try:
        scorer = make_scorer(args.scorer)
    except (ValueError, OSError) as e:
        raise UsageError(str(e)) from e
    out = _Output(args.out)
    failures = 0
    outputs = []
    with scorer:
        for n, (question, clue) in enumerate(rows, 1):
            try:
                result = decipher_detailed(tokenize(question), tokenize(clue), scorer, args.repair)
                for d in result.diagnostics:
                    print(f"line {n}: {d}", file=sys.stderr)
                outputs.append(str(result.output))
            except InvalidMerge as e:
                failures += 1
                print(f"line {n}: InvalidMerge: {e}", file=sys.stderr)
                outputs.append(str(tokenize(question)))
    for line in outputs:
        out.write(line)
    out.close()
    if args.gold:
        golds = _qdt_lines(args.gold)
        if len(golds) != len(outputs):
            raise UsageError(f"{len(outputs)} outputs vs {len(golds)} gold lines")
        report = evaluate_trees(outputs, golds)
        print(f"em {report.em:.4f} ({report.counts['exact']}/{report.counts['n']})", file=sys.stderr)
    return 1 if failures else 0


def cmd_corrupt(args) -> int:
    try:
        rates = CorruptionRates.parse(args.rates) if args.rates else CorruptionRates()
    except ValueError as e:
        raise UsageError(str(e)) from e
    loaded = load_dataset(args.input) if args.input != "-" else None
    if loaded is None:
        raise UsageError("corrupt needs a dataset file")
    diagnostics = list(loaded.diagnostics)
    records = generate_training_set(loaded.records, rates, args.seed, args.lowercase, diagnostics)
    out = _Output(args.out)
    for rec in records:
        out.write(json.dumps(rec.to_json(), ensure_ascii=False))
    out.close()
    for d in diagnostics:
        print(d, file=sys.stderr)
    return 1 if diagnostics else 0


def _aligned(pred: list, gold: list) -> None:
    if len(pred) != len(gold):
        raise UsageError(f"{len(pred)} predictions vs {len(gold)} references")


def cmd_eval_tree(args) -> int:
    preds, golds = _qdt_lines(args.pred), _qdt_lines(args.gold)
    _aligned(preds, golds)
    _report(evaluate_trees(preds, golds, case_sensitive=args.case_sensitive), args.out)
    return 0


def _pair_lines(path: str) -> list:
    items = []
    for line in _qdt_lines(path):
        if "\t" in line:
            a, _, b = line.partition("\t")
            items.append((a, b))
        else:
            items.append(line)
    return items


def cmd_eval_seq(args) -> int:
    preds, golds = _pair_lines(args.pred), _pair_lines(args.gold)
    _aligned(preds, golds)
    _report(evaluate_sequences(preds, golds, case_sensitive=args.case_sensitive), args.out)
    return 0


def _answer_lines(path: str) -> list[set]:
    out = []
    for n, line in enumerate(_read_lines(path), 1):
        try:
            value = json.loads(line)
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}:{n}: expected a JSON list of answers") from e
        if not isinstance(value, list):
            raise UsageError(f"{path}:{n}: expected a JSON list of answers")
        out.append({json.dumps(v, sort_keys=True) if not isinstance(v, str) else v for v in value})
    return out


def cmd_eval_answers(args) -> int:
    preds, golds = _answer_lines(args.pred), _answer_lines(args.gold)
    _aligned(preds, golds)
    _report(EvalReport(answers=answer_set_metrics(preds, golds), counts={"n": len(golds)}), args.out)
    return 0


def cmd_normalize(args) -> int:
    labels = EntityLabelMap.load(args.labels)
    out = _Output(args.out)
    status = 0
    for n, line in enumerate(_read_lines(args.input), 1):
        try:
            out.write(normalize(parse_sexpr(line), labels))
        except QdtError as e:
            status = 1
            print(f"line {n}: {type(e).__name__}: {e}", file=sys.stderr)
            out.write("")
    out.close()
    return status


def cmd_denormalize(args) -> int:
    labels = EntityLabelMap.load(args.labels)
    vocab = load_relation_vocab(args.relations)
    out = _Output(args.out)
    status = 0
    for n, line in enumerate(_read_lines(args.input), 1):
        try:
            out.write(to_text(denormalize(line, labels, vocab)))
        except QdtError as e:
            status = 1
            print(f"line {n}: {type(e).__name__}: {e}", file=sys.stderr)
            out.write("")
    out.close()
    return status


def cmd_stats(args) -> int:
    loaded = load_dataset(args.input)
    table = stats(loaded.records)
    print(table.render())
    if args.out:
        Path(args.out).write_text(json.dumps(table.to_json(), indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")
    for d in loaded.diagnostics:
        print(d, file=sys.stderr)
    return 1 if loaded.diagnostics else 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdt", description="Question Decomposition Tree tools")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        return p

    p = add("parse", cmd_parse, "parse linearized QDTs into JSON trees")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")

    p = add("validate", cmd_validate, "check linearized QDTs (or dataset records)")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--ignore-case", action="store_true", help="compare words to the question case-insensitively")

    p = add("decipher", cmd_decipher, "insert separators into questions guided by clues")
    p.add_argument("--clues", required=True, help="TSV: question<TAB>clue")
    p.add_argument("--scorer", default="align", help="'align' or 'exec:CMD'")
    p.add_argument("--repair", action="store_true", help="drop unmatched brackets instead of failing")
    p.add_argument("--gold", help="optional gold QDTs to report exact match against")
    p.add_argument("--out")

    p = add("corrupt", cmd_corrupt, "build ranker training records from gold QDTs")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rates", help="replace,delete,insert_after,keep (default 0.01,0.01,0.01,0.97)")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("--out")

    for name, func, help in (("eval-tree", cmd_eval_tree, "tree EM / TDA / GED"),
                             ("eval-seq", cmd_eval_seq, "two-part EM / BLEU-4 / ROUGE-L")):
        p = add(name, func, help)
        p.add_argument("--pred", required=True)
        p.add_argument("--gold", required=True)
        p.add_argument("--case-sensitive", action="store_true")
        p.add_argument("--out", help="write the report as JSON")

    p = add("eval-answers", cmd_eval_answers, "answer-set P / R / F1 / accuracy")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out")

    p = add("normalize", cmd_normalize, "S-expressions to bracketed label form")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--labels", required=True, help="TSV: id<TAB>label")
    p.add_argument("--out")

    p = add("denormalize", cmd_denormalize, "bracketed label form back to S-expressions")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--relations", required=True, help="one relation or class id per line")
    p.add_argument("--out")

    p = add("stats", cmd_stats, "composition / conjunction counts per source and split")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        parser.error(str(e))
    except OSError as e:
        print(f"qdt: {e}", file=sys.stderr)
        return 2
    except QdtError as e:
        print(f"qdt: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

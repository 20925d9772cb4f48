"""
Command handlers for the detection engine.
Each handler reads its inputs, calls the services and writes its outputs;
domain errors become exit code 2 through create_exit_error.
"""

import argparse
import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import ValidationError

from app.config import settings
from app.models.markov import TransitionModel
from app.schemas.core import ActivityLabel, SensorCatalog, Session
from app.schemas.preprocess import PreprocessConfig
from app.schemas.synth import GenConfig
from app.services.bayes import classify_session, train_bayes
from app.services.detectors import BayesDetector, Detector, MarkovDetector, Threshold, build_detector
from app.services.evaluation import (
    compare,
    cross_validate,
    pr_points,
    roc_points,
    threshold_sweep,
)
from app.services.markov import score_session_markov, train_markov
from app.services.preprocess import build_session
from app.services.synth import gen_benign, gen_threat, load_profiles
from app.storage.files import (
    format_rate,
    read_frames_csv,
    read_frames_dir,
    read_raw_trace,
    write_comparison_csv,
    write_curve_csv,
    write_frames_csv,
    write_metrics_csv,
    write_pr_csv,
)
from app.storage.model_store import Model, from_model_file, read_model_file, save_model
from app.utils.exceptions import (
    CommandExit,
    FileFormatException,
    InsufficientDataException,
    InvalidGenConfigException,
    SensorGuardException,
    create_exit_error,
)

logger = logging.getLogger(__name__)

EXIT_BENIGN = 0
EXIT_MALICIOUS = 10
EXIT_ERROR = 2

# ValidationError and ValueError cover malformed flag values and value types
HANDLED_ERRORS = (SensorGuardException, ValidationError, ValueError, OSError)

DETECTOR_TYPES = {"markov": MarkovDetector, "bayes": BayesDetector}


def _error_message(e: Exception) -> str:
    return e.message if isinstance(e, SensorGuardException) else str(e)


def _error_details(e: Exception) -> dict:
    return e.details if isinstance(e, SensorGuardException) else {}


def _fail(action: str, e: Exception) -> CommandExit:
    logger.error(f"Error {action}: {_error_message(e)}")
    return create_exit_error(EXIT_ERROR, f"{action} failed: {_error_message(e)}", _error_details(e))


def parse_thresholds(kind: str, text: Optional[str]) -> List[Threshold]:
    """Comma-separated thresholds for a detector kind; None means the default grid."""
    if text is None:
        return list(settings.MARKOV_SWEEP if kind == "markov" else settings.BAYES_SWEEP)
    parser = DETECTOR_TYPES[kind].parse_threshold
    return [parser(part.strip()) for part in text.split(",") if part.strip()]


def load_catalog(value: str) -> SensorCatalog:
    """'default' or the path of a JSON document {"channels": [...]}."""
    if value == "default":
        return SensorCatalog.default()
    path = Path(value)
    try:
        return SensorCatalog.model_validate(json.loads(path.read_text()))
    except (OSError, json.JSONDecodeError) as e:
        raise FileFormatException(f"Cannot read catalog {path}: {e}", {"path": str(path)})


def load_trained(path: Path) -> Tuple[Model, SensorCatalog]:
    return from_model_file(read_model_file(path))


def _check_role(session: Session, malicious: bool) -> Session:
    if session.label == ActivityLabel.UNKNOWN:
        raise FileFormatException(
            f"Session '{session.id}' is labeled Unknown and has no ground truth",
            {"session_id": session.id},
        )
    if session.is_benign == malicious:
        expected = "Malicious" if malicious else "a benign activity"
        raise FileFormatException(
            f"Session '{session.id}' is labeled {session.label.value}, expected {expected}",
            {"session_id": session.id},
        )
    return session


def load_labeled(
    benign_dir: Optional[Path], malicious_dir: Optional[Path], catalog: SensorCatalog
) -> List[Session]:
    """Benign sessions followed by malicious ones; file labels must match their directory."""
    if benign_dir is None and malicious_dir is None:
        raise InsufficientDataException("Give --benign and/or --malicious session directories")
    sessions: List[Session] = []
    if benign_dir is not None:
        sessions += [_check_role(s, False) for s in read_frames_dir(benign_dir, catalog)]
    if malicious_dir is not None:
        sessions += [_check_role(s, True) for s in read_frames_dir(malicious_dir, catalog)]
    return sessions


def _print_report(label: str, threshold: Threshold, report) -> None:
    cm = report.confusion
    print(f"{label} threshold={threshold:g} tp={cm.tp} fn={cm.fn} tn={cm.tn} fp={cm.fp}")
    print(
        f"  recall={format_rate(report.recall)} fnr={format_rate(report.fnr)} "
        f"specificity={format_rate(report.specificity)} fpr={format_rate(report.fpr)}"
    )
    print(
        f"  accuracy={format_rate(report.accuracy)} fscore={format_rate(report.f_score)} "
        f"std_precision={format_rate(report.standard_precision)}"
    )


def cmd_gen(args: argparse.Namespace) -> int:
    """Generate benign or threat sessions, one frames CSV per session."""
    try:
        config = GenConfig(seed=args.seed, seconds=args.seconds, sessions=args.sessions)
        profiles = load_profiles(args.profiles)
        if args.profile is not None:
            try:
                label = ActivityLabel(args.profile)
            except ValueError:
                raise InvalidGenConfigException(
                    f"Unknown activity label '{args.profile}'", {"label": args.profile}
                )
            if not label.is_benign:
                raise InvalidGenConfigException(
                    f"'{label.value}' is not a benign activity profile", {"label": label.value}
                )
            sessions = gen_benign(profiles.profiles[label], config)
        else:
            sessions = gen_threat(args.threat, config, profiles)

        out = Path(args.out)
        for session in sessions:
            path = out / f"{session.id}.csv"
            write_frames_csv(session, path)
            print(f"{path}\t{session.label.value}\t{len(session)}")
        return EXIT_BENIGN

    except HANDLED_ERRORS as e:
        raise _fail("generating sessions", e)


def cmd_preprocess(args: argparse.Namespace) -> int:
    """Turn a raw sensor trace into a frames CSV."""
    try:
        catalog = load_catalog(args.catalog)
        config = PreprocessConfig(
            change_tolerance=args.tolerance, logic_hold_seconds=args.hold_seconds
        )
        out = Path(args.out)
        session = build_session(
            read_raw_trace(Path(args.raw)),
            catalog,
            config,
            ActivityLabel(args.label),
            session_id=args.session_id or out.stem,
        )
        write_frames_csv(session, out, catalog)
        print(f"{out}\t{session.label.value}\t{len(session)}")
        return EXIT_BENIGN

    except HANDLED_ERRORS as e:
        raise _fail("preprocessing trace", e)


def cmd_train(args: argparse.Namespace) -> int:
    """Train a Markov or naive Bayes model from a directory of benign sessions."""
    try:
        catalog = load_catalog(args.catalog)
        sessions = read_frames_dir(Path(args.input), catalog)
        benign = [s for s in sessions if s.is_benign]
        skipped = len(sessions) - len(benign)
        if skipped:
            logger.warning(f"Skipping {skipped} non-benign session(s) in {args.input}")
        if not benign:
            raise InsufficientDataException(
                f"No benign sessions in {args.input}", {"path": str(args.input)}
            )

        if args.kind == "markov":
            model: Model = train_markov(benign)
        else:
            model = train_bayes(benign, args.alpha)
        save_model(model, Path(args.out), catalog)

        if isinstance(model, TransitionModel):
            print(
                f"markov model: {len(benign)} sessions, {model.states_observed} states observed, "
                f"{len(model.counts)} transitions -> {args.out}"
            )
        else:
            rows, cols = model.theta.shape
            print(
                f"bayes model: {len(benign)} sessions, theta {rows}x{cols}, "
                f"alpha {model.smoothing_alpha:g} -> {args.out}"
            )
        return EXIT_BENIGN

    except HANDLED_ERRORS as e:
        raise _fail("training model", e)


def cmd_score(args: argparse.Namespace) -> int:
    """Score one session; exit 0 when benign, 10 when malicious."""
    try:
        model, catalog = load_trained(Path(args.model))
        detector = build_detector(model, args.interval)
        threshold = (
            detector.parse_threshold(args.threshold)
            if args.threshold is not None
            else (settings.MARKOV_THRESHOLD if detector.kind == "markov" else settings.BAYES_THRESHOLD)
        )
        session = read_frames_csv(Path(args.input), catalog)

        if detector.kind == "markov":
            verdict = score_session_markov(model, session, threshold)
            malicious = verdict.is_malicious
            print(
                f"{session.id}: {'MALICIOUS' if malicious else 'BENIGN'} "
                f"max_consecutive_malicious={verdict.max_consecutive_malicious} threshold={threshold}"
            )
        else:
            verdict = classify_session(model, session, threshold, args.interval)
            malicious = verdict.is_malicious
            print(
                f"{session.id}: {'MALICIOUS' if malicious else 'BENIGN'} "
                f"best_activity={verdict.best_activity.value} best_value={verdict.best_value:.6f} "
                f"window={verdict.window_index} threshold={threshold:g}"
            )
        return EXIT_MALICIOUS if malicious else EXIT_BENIGN

    except HANDLED_ERRORS as e:
        raise _fail("scoring session", e)


def _evaluation_inputs(args: argparse.Namespace) -> Tuple[Detector, List[Session]]:
    model, catalog = load_trained(Path(args.model))
    detector = build_detector(model, args.interval)
    return detector, load_labeled(args.benign, args.malicious, catalog)


def cmd_eval(args: argparse.Namespace) -> int:
    """Metrics at one threshold."""
    try:
        detector, sessions = _evaluation_inputs(args)
        threshold = (
            detector.parse_threshold(args.threshold)
            if args.threshold is not None
            else (settings.MARKOV_THRESHOLD if detector.kind == "markov" else settings.BAYES_THRESHOLD)
        )
        rows = threshold_sweep(detector, sessions, [threshold])
        _print_report(detector.kind, threshold, rows[0].report)
        if args.out:
            write_metrics_csv(rows, Path(args.out))
        return EXIT_BENIGN

    except HANDLED_ERRORS as e:
        raise _fail("evaluating model", e)


def cmd_sweep(args: argparse.Namespace) -> int:
    """Metrics CSV with one row per threshold."""
    try:
        detector, sessions = _evaluation_inputs(args)
        rows = threshold_sweep(detector, sessions, parse_thresholds(detector.kind, args.thresholds))
        write_metrics_csv(rows, Path(args.out))
        print(f"{len(rows)} thresholds -> {args.out}")
        return EXIT_BENIGN

    except HANDLED_ERRORS as e:
        raise _fail("sweeping thresholds", e)


def cmd_roc(args: argparse.Namespace) -> int:
    """ROC points (threshold,fpr,tpr) and, optionally, PR points (threshold,recall,precision)."""
    try:
        detector, sessions = _evaluation_inputs(args)
        rows = threshold_sweep(detector, sessions, parse_thresholds(detector.kind, args.thresholds))
        points = roc_points(rows)
        write_curve_csv(points, Path(args.out))
        if args.pr_out:
            write_pr_csv(pr_points(rows), Path(args.pr_out))
        print(f"{len(points)} ROC points -> {args.out}")
        return EXIT_BENIGN

    except HANDLED_ERRORS as e:
        raise _fail("computing ROC curve", e)


def cmd_crossval(args: argparse.Namespace) -> int:
    """k-fold cross-validation; writes the pooled sweep."""
    try:
        thresholds = parse_thresholds(args.kind, args.thresholds)
        sessions = load_labeled(args.benign, args.malicious, load_catalog(args.catalog))
        result = cross_validate(
            args.kind,
            sessions,
            k=args.folds,
            seed=args.seed,
            thresholds=thresholds,
            alpha=args.alpha,
            interval=args.interval,
        )
        write_metrics_csv(result.pooled, Path(args.out))
        print(f"{args.folds} folds, {len(result.pooled)} thresholds -> {args.out}")
        return EXIT_BENIGN

    except HANDLED_ERRORS as e:
        raise _fail("cross-validating", e)


def cmd_compare(args: argparse.Namespace) -> int:
    """Markov and naive Bayes side by side at their operating thresholds."""
    try:
        markov_model, catalog = load_trained(Path(args.markov_model))
        bayes_model, bayes_catalog = load_trained(Path(args.bayes_model))
        if bayes_catalog != catalog:
            raise FileFormatException("The two models were trained on different channel catalogs")
        markov = build_detector(markov_model)
        bayes = build_detector(bayes_model, args.interval)
        if markov.kind != "markov" or bayes.kind != "bayes":
            raise FileFormatException(
                f"Expected a markov and a bayes model, got {markov.kind} and {bayes.kind}"
            )

        sessions = load_labeled(args.benign, args.malicious, catalog)
        rows = compare(
            [
                (markov, markov.parse_threshold(args.markov_threshold), settings.MARKOV_SWEEP),
                (bayes, bayes.parse_threshold(args.bayes_threshold), settings.BAYES_SWEEP),
            ],
            sessions,
        )
        for row in rows:
            _print_report(row.detector, row.threshold, row.report)
            print(f"  auprc={format_rate(row.auprc)}")
        write_comparison_csv(rows, Path(args.out))
        return EXIT_BENIGN

    except HANDLED_ERRORS as e:
        raise _fail("comparing detectors", e)


def _add_eval_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, help="Trained model file")
    parser.add_argument("--benign", type=Path, help="Directory of benign frames CSVs")
    parser.add_argument("--malicious", type=Path, help="Directory of malicious frames CSVs")
    parser.add_argument("--interval", type=int, help="Naive Bayes scoring window in seconds")


def add_commands(subparsers) -> None:
    """Register every command on an argparse subparsers object."""
    gen = subparsers.add_parser("gen", help="Generate synthetic sessions")
    source = gen.add_mutually_exclusive_group(required=True)
    source.add_argument("--profile", help="Benign activity label, e.g. Sleeping")
    source.add_argument("--threat", type=int, help="Threat scenario 1, 2 or 3")
    gen.add_argument("--sessions", type=int, default=1)
    gen.add_argument("--seconds", type=int, default=settings.SESSION_SECONDS)
    gen.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    gen.add_argument("--profiles", type=Path, help="Profile table JSON (default: shipped table)")
    gen.add_argument("--out", required=True, help="Output directory")
    gen.set_defaults(handler=cmd_gen)

    pre = subparsers.add_parser("preprocess", help="Convert a raw trace to a frames CSV")
    pre.add_argument("--raw", required=True, help="Raw CSV timestamp_ms,channel,value")
    pre.add_argument("--catalog", default="default", help="'default' or a catalog JSON file")
    pre.add_argument("--out", required=True, help="Output frames CSV")
    pre.add_argument("--label", default=ActivityLabel.UNKNOWN.value)
    pre.add_argument("--session-id", help="Session id (default: output file stem)")
    pre.add_argument("--tolerance", type=float, default=settings.CHANGE_TOLERANCE)
    pre.add_argument("--hold-seconds", type=int, default=settings.LOGIC_HOLD_SECONDS)
    pre.set_defaults(handler=cmd_preprocess)

    train = subparsers.add_parser("train", help="Train a detector model")
    train.add_argument("kind", choices=["markov", "bayes"])
    train.add_argument("--in", dest="input", required=True, help="Directory of frames CSVs")
    train.add_argument("--out", required=True, help="Output model file")
    train.add_argument("--alpha", type=float, default=settings.SMOOTHING_ALPHA)
    train.add_argument("--catalog", default="default", help="'default' or a catalog JSON file")
    train.set_defaults(handler=cmd_train)

    score = subparsers.add_parser("score", help="Score one session (exit 0 benign, 10 malicious)")
    score.add_argument("--model", required=True)
    score.add_argument("--in", dest="input", required=True, help="Frames CSV")
    score.add_argument("--threshold", help="Run length (markov) or probability (bayes)")
    score.add_argument("--interval", type=int, help="Naive Bayes scoring window in seconds")
    score.set_defaults(handler=cmd_score)

    evaluate = subparsers.add_parser("eval", help="Metrics at one threshold")
    _add_eval_inputs(evaluate)
    evaluate.add_argument("--threshold")
    evaluate.add_argument("--out", help="Optional metrics CSV")
    evaluate.set_defaults(handler=cmd_eval)

    sweep = subparsers.add_parser("sweep", help="Metrics CSV over a threshold grid")
    _add_eval_inputs(sweep)
    sweep.add_argument("--thresholds", help="Comma-separated grid (default: detector grid)")
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(handler=cmd_sweep)

    roc = subparsers.add_parser("roc", help="ROC curve points CSV")
    _add_eval_inputs(roc)
    roc.add_argument("--thresholds", help="Comma-separated grid (default: detector grid)")
    roc.add_argument("--out", required=True)
    roc.add_argument("--pr-out", help="Optional precision-recall points CSV")
    roc.set_defaults(handler=cmd_roc)

    crossval = subparsers.add_parser("crossval", help="Stratified k-fold cross-validation")
    crossval.add_argument("--kind", choices=["markov", "bayes"], required=True)
    crossval.add_argument("--benign", type=Path)
    crossval.add_argument("--malicious", type=Path)
    crossval.add_argument("--catalog", default="default", help="'default' or a catalog JSON file")
    crossval.add_argument("--folds", type=int, default=settings.CV_FOLDS)
    crossval.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    crossval.add_argument("--thresholds")
    crossval.add_argument("--alpha", type=float, default=settings.SMOOTHING_ALPHA)
    crossval.add_argument("--interval", type=int)
    crossval.add_argument("--out", required=True)
    crossval.set_defaults(handler=cmd_crossval)

    comp = subparsers.add_parser("compare", help="Compare Markov and naive Bayes detectors")
    comp.add_argument("--markov-model", required=True)
    comp.add_argument("--bayes-model", required=True)
    comp.add_argument("--benign", type=Path)
    comp.add_argument("--malicious", type=Path)
    comp.add_argument("--markov-threshold", default=str(settings.MARKOV_THRESHOLD))
    comp.add_argument("--bayes-threshold", default=str(settings.BAYES_THRESHOLD))
    comp.add_argument("--interval", type=int)
    comp.add_argument("--out", required=True)
    comp.set_defaults(handler=cmd_compare)


"""Command-line workflow driver.

Exit codes are stable for scripting: 0 success, 1 usage, 2 parse or
validation failure, 3 not authorized, 4 I/O failure, 5 integrity or
authentication failure. Every file write is atomic (temp file plus
rename), so a failed run never leaves a partial artifact behind.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import tempfile

from . import bench as bench_mod
from . import bilinear, scheme, store
from .attrspace import AttributeMatrix, AttributeSet, load_matrix
from .lsss import ChildSpec, NotAuthorized, PolicyError, compile_policy, leaves, parse_policy
from .scheme import InvalidTag

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_NOT_AUTHORIZED = 3
EXIT_IO = 4
EXIT_INTEGRITY = 5

SEED_ENV = "APRABE_TEST_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _write_atomic(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".aprabe-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _load_file(path: str, expect_kind: int):
    with open(path, "rb") as handle:
        return store.load(handle.read(), expect_kind=expect_kind)


def _make_rng(args) -> random.Random:
    seed = getattr(args, "seed", None)
    if seed is None:
        return random.SystemRandom()
    if os.environ.get(SEED_ENV) != "1":
        raise UsageError(
            f"--seed is a test facility; set {SEED_ENV}=1 to acknowledge deterministic keys"
        )
    return random.Random(seed)


def _parse_attr_set(text: str, matrix: AttributeMatrix) -> AttributeSet:
    """Semicolon-separated vector literals, the same literal syntax the
    policy grammar uses; shorter vectors are padded with the empty token."""
    chunks = [chunk.strip() for chunk in text.split(";") if chunk.strip()]
    if not chunks:
        raise PolicyError("no attribute vectors given")
    formula = parse_policy(" AND ".join(chunks), matrix)
    return AttributeSet(tuple(leaf.vector for leaf in leaves(formula)))


def _cmd_setup(args) -> int:
    rng = _make_rng(args)
    with open(args.matrix, "r", encoding="utf-8") as handle:
        matrix = load_matrix(handle.read())
    bits = args.prime_bits or bilinear.DEFAULT_PRIME_BITS[args.backend]
    params = bilinear.gen_params(bits, args.backend, rng)
    pk, msk = scheme.setup(matrix, params, rng)
    _write_atomic(args.pk, store.save(pk))
    _write_atomic(args.msk, store.save(msk, params))
    print(f"wrote {args.pk} and {args.msk} "
          f"(backend={args.backend}, N={params.modulus.n.bit_length()} bits, "
          f"L={matrix.depth}, D={matrix.width})")
    return EXIT_OK


def _cmd_keygen(args) -> int:
    rng = _make_rng(args)
    pk = _load_file(args.pk, store.KIND_PK)
    msk = _load_file(args.msk, store.KIND_MSK)
    store.check_fingerprint(pk, msk)
    formula = parse_policy(args.policy, pk.matrix)
    structure = compile_policy(formula, pk.params.modulus.n)
    sk = scheme.keygen(pk, msk, structure, rng)
    _write_atomic(args.out, store.save(sk, pk.params))
    print(f"wrote {args.out} (depth={sk.depth}, rows={structure.rows})")
    return EXIT_OK


def _cmd_delegate(args) -> int:
    rng = _make_rng(args)
    assignments = []
    for item in args.extend:
        row_text, sep, suffix = item.partition("=")
        if not sep or not row_text.strip() or not suffix.strip():
            raise UsageError(f"--extend expects ROW=SUFFIX, got {item!r}")
        try:
            row = int(row_text)
        except ValueError:
            raise UsageError(f"--extend row must be an integer, got {row_text!r}") from None
        if row < 1:
            raise UsageError("--extend rows are numbered from 1")
        assignments.append((row - 1, suffix.strip()))
    pk = _load_file(args.pk, store.KIND_PK)
    sk = _load_file(args.key, store.KIND_SK)
    store.check_fingerprint(pk, sk)
    child = scheme.delegate(pk, sk, ChildSpec(tuple(assignments)), rng)
    _write_atomic(args.out, store.save(child, pk.params))
    print(f"wrote {args.out} (depth={child.depth}, rows={child.structure.rows})")
    return EXIT_OK


def _cmd_encrypt(args) -> int:
    rng = _make_rng(args)
    pk = _load_file(args.pk, store.KIND_PK)
    attrs = _parse_attr_set(args.attrs, pk.matrix)
    with open(args.infile, "rb") as handle:
        payload = handle.read()
    ct, blob = scheme.kem_encrypt(pk, attrs, payload, rng)
    _write_atomic(args.out, store.save(scheme.with_payload(ct, blob), pk.params))
    print(f"wrote {args.out} ({len(payload)} payload bytes under {len(attrs)} vectors)")
    return EXIT_OK


def _cmd_decrypt(args) -> int:
    pk = _load_file(args.pk, store.KIND_PK)
    sk = _load_file(args.key, store.KIND_SK)
    ct = _load_file(args.infile, store.KIND_CT)
    store.check_fingerprint(pk, sk)
    store.check_fingerprint(pk, ct)
    if not ct.payload:
        raise UsageError("ciphertext carries no sealed payload")
    payload = scheme.kem_decrypt(pk, sk, ct, ct.payload)
    _write_atomic(args.out, payload)
    print(f"wrote {args.out} ({len(payload)} bytes)")
    return EXIT_OK


def _cmd_inspect(args) -> int:
    with open(args.infile, "rb") as handle:
        info = store.describe(handle.read())
    for key, value in info.items():
        print(f"{key}: {value}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    rows = bench_mod.run_bench(levels=args.levels, max_rows=args.rows, seed=args.seed)
    print(bench_mod.format_table(rows))
    if args.report:
        created = bench_mod.write_report(rows, args.report)
        for path in created:
            print(f"wrote {path}")
    if any(not row.ok for row in rows):
        print("count model mismatch", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


DEMO_MATRIX = {
    "levels": [
        ["HospitalA", "HospitalB", "Professor", "Years5"],
        ["Cardiologist", "Gastroenterologist", "∅", "∅"],
    ]
}


def _cmd_demo(args) -> int:
    """Health-records walkthrough: records are encrypted under specific
    attributes, the patient issues a key for a general policy, and the
    key holder redefines the policy toward a specialty and delegates."""
    rng = _make_rng(args)
    backend = args.backend
    bits = args.prime_bits or bilinear.DEFAULT_PRIME_BITS[backend]
    print(f"[1/6] group setup: backend={backend}, {bits}-bit primes")
    matrix = AttributeMatrix(tuple(tuple(row) for row in DEMO_MATRIX["levels"]))
    params = bilinear.gen_params(bits, backend, rng)
    pk, msk = scheme.setup(matrix, params, rng)
    print(f"      attribute matrix: {matrix.depth} levels x {matrix.width} columns")

    record = b"patient: alice\nfinding: arrhythmia under exertion\n"
    attrs = _parse_attr_set("[HospitalA,Cardiologist];[Professor];[Years5]", matrix)
    print(f"[2/6] encrypt record under S = {'; '.join(str(v) for v in attrs)}")
    ct, blob = scheme.kem_encrypt(pk, attrs, record, rng)

    policy = "[HospitalA] AND [Professor] AND [Years5]"
    print(f"[3/6] issue key for the general policy {policy}")
    sk = scheme.keygen(pk, msk, compile_policy(parse_policy(policy, matrix), params.modulus.n), rng)
    print(f"      key depth {sk.depth}, {sk.structure.rows} rows; "
          f"ciphertext depth {ct.depth}: a depth-1 key cannot open it")

    print("[4/6] redefine toward the specialty: extend row 1 with Cardiologist, pad the rest")
    spec = ChildSpec(((0, "Cardiologist"), (1, "∅"), (2, "∅")))
    child = scheme.delegate(pk, sk, spec, rng)
    print(f"      delegated key depth {child.depth}: "
          + " AND ".join(str(v) for v in child.structure.rho))

    print("[5/6] decrypt with the delegated key")
    recovered = scheme.kem_decrypt(pk, child, ct, blob)
    if recovered != record:
        print("decrypt FAILED", file=sys.stderr)
        return EXIT_INTEGRITY

    print("[6/6] sanity: a gastroenterology redefinition must not open it")
    wrong = scheme.delegate(
        pk, sk, ChildSpec(((0, "Gastroenterologist"), (1, "∅"), (2, "∅"))), rng
    )
    try:
        scheme.kem_decrypt(pk, wrong, ct, blob)
    except NotAuthorized:
        pass
    else:
        print("unauthorized key unexpectedly decrypted", file=sys.stderr)
        return EXIT_INTEGRITY
    print("decrypt OK")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="aprabe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None,
                       help=f"deterministic rng (requires {SEED_ENV}=1)")

    p = sub.add_parser("setup", help="generate group params, public key and master key")
    p.add_argument("--matrix", required=True, help="attribute matrix JSON file")
    p.add_argument("--pk", required=True)
    p.add_argument("--msk", required=True)
    p.add_argument("--backend", choices=[bilinear.DEBUG, bilinear.CURVE], default=bilinear.DEBUG)
    p.add_argument("--prime-bits", type=int, default=None)
    add_seed(p)
    p.set_defaults(func=_cmd_setup)

    p = sub.add_parser("keygen", help="issue a key for a policy")
    p.add_argument("--pk", required=True)
    p.add_argument("--msk", required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--out", required=True)
    add_seed(p)
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("delegate", help="redefine a key's policy one level deeper")
    p.add_argument("--pk", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--extend", action="append", required=True, metavar="ROW=SUFFIX",
                   help="extend parent row ROW (1-based) with SUFFIX; repeatable")
    p.add_argument("--out", required=True)
    add_seed(p)
    p.set_defaults(func=_cmd_delegate)

    p = sub.add_parser("encrypt", help="seal a file under an attribute set")
    p.add_argument("--pk", required=True)
    p.add_argument("--attrs", required=True,
                   help="semicolon-separated vector literals, e.g. '[A,B];[C]'")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    add_seed(p)
    p.set_defaults(func=_cmd_encrypt)

    p = sub.add_parser("decrypt", help="open a sealed file")
    p.add_argument("--pk", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_decrypt)

    p = sub.add_parser("inspect", help="print artifact metadata")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("bench", help="measure operation counts against the cost model")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--rows", type=int, default=6)
    p.add_argument("--report", default=None, help="directory for CSV and figures")
    add_seed(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("demo", help="run the health-records scenario end to end")
    p.add_argument("--backend", choices=[bilinear.DEBUG, bilinear.CURVE], default=bilinear.DEBUG)
    p.add_argument("--prime-bits", type=int, default=None)
    add_seed(p)
    p.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PolicyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotAuthorized:
        print("error: key is not authorized for this ciphertext", file=sys.stderr)
        return EXIT_NOT_AUTHORIZED
    except store.IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except InvalidTag:
        print("authentication error: sealed payload fails verification", file=sys.stderr)
        return EXIT_INTEGRITY
    except store.StoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

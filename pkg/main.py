import sys

from cli.router import cli


def main(argv=None) -> int:
    """
    Run one command and return its exit code

    0 on PASS, 1 on a failed verification or toolkit error, 2 on usage errors.
    """
    try:
        cli.main(args=argv, prog_name="orbit-tiling", standalone_mode=True)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else (0 if e.code is None else 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())

import os
from pathlib import Path

if os.environ.get("WITHOUT_MYPYC", "False") != "False":

    def build(setup_kwargs):
        pass

else:

    def build(setup_kwargs):
        try:
            from mypyc.build import mypycify
        except ImportError:
            print("Error in import mypyc.build, skip build.", flush=True)
            return

        modules = [
            str(Path("tamecycles") / name)
            for name in (
                "linalg.py",
                "complexes.py",
                "posets.py",
                "sheaves.py",
                "derived.py",
            )
        ]
        setup_kwargs.update(
            {
                "ext_modules": mypycify(["--ignore-missing-imports", *modules]),
            }
        )

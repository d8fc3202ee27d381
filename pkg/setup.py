from setuptools import Extension, setup

# The C kernel is an accelerator only; align.py falls back to pure Python.
setup(
    ext_modules=[
        Extension("subphon._levenshtein", ["src/subphon/_levenshtein.c"], optional=True),
    ]
)

# noqa:D104 pylint:disable=missing-module-docstring

import sys

import semantic_version
import toml

PYPROJECT = "pyproject.toml"
PARTS = ("major", "minor", "patch")


def read_version(path=PYPROJECT):
    pyproject = toml.load(path)
    project = semantic_version.Version(pyproject["project"]["version"])
    poetry = semantic_version.Version(pyproject["tool"]["poetry"]["version"])
    if project != poetry:
        raise ValueError(f"[project] has version {project} but [tool.poetry] has {poetry}")
    return project


def write_version(version, path=PYPROJECT):
    pyproject = toml.load(path)
    # Both tables carry the version; keep them in step
    pyproject["project"]["version"] = str(version)
    pyproject["tool"]["poetry"]["version"] = str(version)
    with open(path, "w") as file:
        toml.dump(pyproject, file)


def bump_version(part, path=PYPROJECT):
    if part not in PARTS:
        raise ValueError(f"Invalid part {part!r}: choose one of {', '.join(PARTS)}")
    version = read_version(path)
    new_version = getattr(version, f"next_{part}")()
    write_version(new_version, path)
    print(f"Updated version {version} -> {new_version}")
    return new_version


if __name__ == "__main__":
    if len(sys.argv) < 2 or sys.argv[1] not in ("read",) + PARTS:
        raise ValueError("Missing command: choose 'read', 'major', 'minor' or 'patch'")

    if sys.argv[1] == "read":
        print(read_version())
    else:
        bump_version(sys.argv[1])

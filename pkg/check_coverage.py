import subprocess


def run_coverage():
    try:
        # Slow statistical tests are deselected by the pytest defaults
        subprocess.run(
            ["poetry", "run", "coverage", "run", "--source=src/cliffordtori", "-m", "pytest"],
            check=True,
        )
        subprocess.run(["poetry", "run", "coverage", "report", "--fail-under=90"], check=True)
    except subprocess.CalledProcessError as e:
        print(f"Coverage check failed: {e}")


if __name__ == "__main__":
    run_coverage()

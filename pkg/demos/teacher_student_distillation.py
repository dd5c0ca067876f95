"""Bootstrap a student classifier from a teacher's imputed labels.

The labeled pool is split in half: a teacher CNN trains on one half,
then labels the raw inputs of the other half. A fresh student trains
purely on those teacher-made labels and is scored on held-out data. The
student tracks the teacher closely even though it never saw a true
label.
"""

from pipeboot.experiments import ClassifyConfig, run_classify_experiment


def main():
    result = run_classify_experiment(ClassifyConfig())

    print(f"{'method':<10} {'test accuracy':>14} {'flops/image':>12}")
    for row in result.rows:
        print(f"{row.method:<10} {row.value:>14.4f} {row.flops:>12}")
    pipeline = result.artifacts["pipeline"]
    print(f"\nteacher labeled {pipeline.calls} inputs for the student")
    scores = {r.method: r.value for r in result.rows}
    print(f"student - teacher = {scores['student'] - scores['teacher']:+.4f}")


if __name__ == "__main__":
    main()

# File: src/utils/report_generator.py
"""Plain-text, CSV and JSON renderings of CLI results"""

from typing import Any, Dict, Sequence
import csv
import io
import json

COMPARISON_HEADER = ("p", "eta_max", "povm_bound", "ratio")


def _g(value: Any) -> str:
    return format(float(value), ".17g")


class ReportGenerator:
    """Render verification reports, bound comparisons and simulated counts"""

    def verification_text(self, report) -> str:
        lines = [f"Verification d={report.d} seed={report.seed} samples={report.samples} "
                 f"suites={','.join(report.suites)}", "=" * 60]
        for check in report.checks:
            status = "PASS" if check.passed else "FAIL"
            line = f"[{status}] {check.suite:<11} {check.name}"
            if check.measured is not None:
                line += f": measured {check.measured}"
            if check.expected is not None:
                line += f", expected {check.expected}"
            if check.std_error is not None:
                line += f", std error {check.std_error:.3g}"
            if check.detail:
                line += f" ({check.detail})"
            lines.append(line)
        passed = len(report.checks) - len(report.failures)
        lines.append("=" * 60)
        lines.append(f"{passed}/{len(report.checks)} checks passed")
        return "\n".join(lines) + "\n"

    def comparison_csv(self, rows: Sequence) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(COMPARISON_HEADER)
        for row in rows:
            writer.writerow([_g(row.p), _g(row.eta_max), _g(row.povm_bound), _g(row.ratio)])
        return buffer.getvalue()

    def comparison_json(self, d: int, rows: Sequence) -> str:
        payload: Dict[str, Any] = {"d": int(d), "rows": []}
        for row in rows:
            item = row.to_dict()
            # JSON has no NaN; the p = 1 ratio is undefined
            if item["ratio"] != item["ratio"]:
                item["ratio"] = None
            payload["rows"].append(item)
        return json.dumps(payload, indent=2)

    def counts_text(self, result) -> str:
        lines = [f"{'outcome':>8} {'count':>10} {'observed':>10} {'expected':>10}"]
        for label, count, probability in zip(result.labels, result.counts, result.expected):
            lines.append(f"{label:>8} {int(count):>10d} {count / result.shots:>10.6f} {probability:>10.6f}")
        lines.append(f"chi2 = {result.chi2:.6g}, p-value = {result.pvalue:.6g}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def write(text: str, path: str):
        """Write text to path; OSError propagates to the caller"""
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)

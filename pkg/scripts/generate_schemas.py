"""Regenerate the JSON schema files shipped in schemas/.

Run after changing any service response model:
    python3 scripts/generate_schemas.py
"""

from __future__ import annotations

import json
from pathlib import Path

from parallelqa.service import schemas

PUBLISHED = {
    "next_pair_response": schemas.NextPairResponse,
    "annotation_request": schemas.AnnotationRequest,
    "annotation_receipt": schemas.AnnotationReceipt,
    "violations_response": schemas.ViolationsResponse,
    "retrieval_report": schemas.RetrievalReportModel,
    "eval_report": schemas.EvalReportModel,
    "dataset_stats": schemas.DatasetStatsModel,
}


def main() -> None:
    out_dir = Path(__file__).resolve().parents[1] / "schemas"
    out_dir.mkdir(exist_ok=True)
    for name, model in PUBLISHED.items():
        path = out_dir / f"{name}.schema.json"
        path.write_text(
            json.dumps(model.model_json_schema(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        print(f"wrote {path}")


if __name__ == "__main__":
    main()

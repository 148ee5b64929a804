#!/usr/bin/env python3
"""Regenerates regex_golden.jsonl with Python's `re` as the reference engine.

The rule set is given line-wrapped; lines are stripped and concatenated.
"""

import json
import pathlib
import re

WRAPPED = r"""
(?i)(?:\bPulm.{0,10}hypertension\b|\bPH\b|\bPulm.?HTN
\b|\bp.?HTN\b|\bp.?AH\b|\barterial.hypertension\b|\bPHT\b|
(?:\belevated\b|\bhigh\b).(?:\bPASP\b|\bpulm.{0,10}art.
{0,5}sys|\bpulm.{0,10}art.{0,5}pr|\bPAP\b)|(?:\belevated\b|
\bhigh\b).(?:\bRVSP\b|\bRVP\b|\br.{0,5}v.{0,15}sys.{0,7}
pressure\b|\br.{0,5}v.{0,15}pressure\b)\b|\bflat.
{0,7}septum\b|\bseptal.flat|(?:\benlarge.{0,15}|
\bdilat.{0,15})\bpulm.{0,10}art|\bPH-ILD\b|\bPHILD\b|
\bCTEPH\b|\bPH-COPD\b|\bPHCOPD\b)
"""

PATTERN = "".join(line.strip() for line in WRAPPED.strip().splitlines())

CASES = [
    # Affirmative mentions.
    "History of pulmonary hypertension.",
    "Pulmonary arterial hypertension on ambrisentan",
    "pulm hypertension",
    "PULMONARY   HYPERTENSION",
    "PH",
    "Known PH, followed in clinic",
    "arterial hypertension",
    # Abbreviations.
    "PHT noted",
    "pHTN",
    "p-HTN",
    "PulmHTN",
    "pulm HTN",
    "pAH",
    "PAH",
    "CTEPH",
    "PH-ILD",
    "PHILD",
    "PH-COPD",
    "PHCOPD",
    # Elevated PASP / RVSP phrasings.
    "elevated PASP",
    "high PASP of 60",
    "elevated pulmonary artery systolic pressure",
    "high pulmonary artery pressure",
    "elevated PAP",
    "elevated RVSP",
    "high RVP",
    "elevated RV systolic pressure",
    "elevated RV pressure",
    # Septal flattening and dilated arteries.
    "flattened septum",
    "flat septum",
    "septal flattening",
    "dilated main pulmonary artery",
    "enlarged pulmonary artery",
    # Known over-matches of the rule set.
    "ph.d. candidate",
    "pH 7.4 on arterial gas",
    # Near misses.
    "pulmonary                  hypertension",
    "suspicion of pulmonary\nhypertension",
    "EPH",
    "CTEPHX",
    "elevatedPASP",
    "RVSP 35 mmHg, normal",
    "PASP normal",
    "flat interventricular septum",
    "septal\nflattening",
    "hypertension",
    "systemic hypertension well controlled",
    "elevated blood pressure",
    "high blood pressure",
    "pathology report unremarkable",
    "physical exam benign",
    "phosphate normal",
    "pulmonary embolism ruled out",
    "alpha",
    "graph",
    "pulmonic stenosis",
    "the phenotype",
    "",
]


def main():
    regex = re.compile(PATTERN)
    out = pathlib.Path(__file__).with_name("regex_golden.jsonl")
    with out.open("w", encoding="utf-8") as f:
        for text in CASES:
            row = {"text": text, "match": bool(regex.search(text))}
            f.write(json.dumps(row, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()

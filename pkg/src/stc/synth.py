"""Deterministic generators for test and benchmark corpora.

:func:`maud_like` produces merger-agreement style records with the MAUD
columns: a long clause ``text`` shared by all questions of one deal point
category within a contract, a ``question`` drawn from a fixed bank, a short
categorical ``answer``, and a ``contract_name`` unique to each contract.
Every (contract, question) pair occurs exactly once, so sampled queries have a
single planted target row.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass

from .ingestion import MaudColumns, MaudRecord, Sheet, TabularDocument, make_sheet, maud_records

MAUD_COLUMN_ORDER = ("text", "deal_point_category", "deal_point_type", "question", "answer", "contract_name")

_SYLLABLES = (
    "ar bel cor dan el fen gar hol in jor kal lum mar nor ol pen quin ros sal tor ul ven wes xan yor zel "
    "bri cas dra fro gla hex ion kry lix mon nex orb pra qua ryn syn tri vox wyn zen"
).split()
_SUFFIXES = ("Inc.", "Corp.", "Holdings, Inc.", "Group plc", "Technologies Inc.", "Pharmaceuticals, Inc.", "LLC", "Co.")

_LEGAL = (
    "the company parent merger sub shall agreement effective time closing date material adverse effect "
    "subsidiaries taken as a whole any change event occurrence development condition circumstance fact effect "
    "that individually or in the aggregate would reasonably be expected to prevent materially delay impair "
    "ability consummate transactions contemplated hereby provided however none of following shall be deemed "
    "constitute taken into account determining whether there has been resulting from arising out of "
    "general economic political conditions financial credit securities markets including interest rates "
    "exchange rates changes in applicable law gaap interpretation thereof acts of war sabotage terrorism "
    "pandemic epidemic hurricanes earthquakes natural disasters announcement pendency identity of "
    "failure to meet internal projections forecasts revenue earnings predictions underlying cause "
    "disproportionate impact relative to other participants industries in which operates representations "
    "warranties covenants true and correct in all material respects as of date hereof except to extent "
    "expressly made specified earlier date reasonable best efforts commercially obtain consents approvals "
    "authorizations governmental entity antitrust hsr act waiting period termination fee payable "
    "acquisition proposal superior proposal board of directors recommendation change fiduciary duties "
    "notice period match right intervening event knowledge actual officers listed section schedule "
    "specific performance remedies equitable relief irreparable damage ordinary course of business "
    "consistent with past practice capital expenditures indebtedness dividends"
).split()

_CATEGORIES = {
    "Conditions to Closing": [
        "Accuracy of Target General R&W: Bringdown Timing",
        "Accuracy of Target Capitalization R&W: Bringdown Standard",
        "Accuracy of Fundamental Target R&Ws: Bringdown Standard",
        "Compliance with Covenant Closing Condition",
        "Absence of Litigation Closing Condition: Governmental v. Non-Governmental",
        "Financing Condition",
        "Minimum Tender Condition Threshold",
        "No MAE Closing Condition Timing",
        "Regulatory Approval Closing Condition Scope",
        "Third Party Consents Closing Condition",
        "Dissenting Shares Closing Condition",
        "Stockholder Approval Threshold",
    ],
    "Material Adverse Effect": [
        "MAE Definition: Changes in GAAP carve-out",
        "MAE Definition: Changes in Law carve-out",
        "MAE Definition: Pandemic or Disease Outbreak carve-out",
        "MAE Definition: Acts of War or Terrorism carve-out",
        "MAE Definition: Failure to Meet Projections carve-out",
        "MAE Definition: Announcement of Transaction carve-out",
        "MAE Definition: Disproportionate Impact Qualifier",
        "MAE Definition: Prospects included",
        "MAE Definition: Ability to Consummate prong",
        "MAE Definition: Forward Looking Standard",
        "MAE Definition: Natural Disasters carve-out",
        "MAE Definition: Industry Conditions carve-out",
        "MAE Definition: Financial Markets carve-out",
        "MAE Definition: Stock Price Decline carve-out",
    ],
    "Deal Protection and Related Provisions": [
        "No-Shop: Fiduciary Exception Standard",
        "No-Shop: Superior Proposal Threshold",
        "Change in Recommendation: Intervening Event Trigger",
        "Change in Recommendation: Notice Period Length",
        "Change in Recommendation: Match Right",
        "Termination Fee: Triggering Events",
        "Termination Fee: Tail Period Length",
        "Termination Fee: Percentage of Equity Value",
        "Reverse Termination Fee: Regulatory Failure",
        "Go-Shop Period Length",
        "Fiduciary Termination Right",
        "Standstill Waiver Provision",
        "Expense Reimbursement Cap",
    ],
    "Operating and Efforts Covenant": [
        "Ordinary Course Covenant: Standard",
        "Ordinary Course Covenant: Pandemic Exception",
        "Negative Interim Operating Covenant: Consent Standard",
        "Efforts Standard for Regulatory Approvals",
        "Hell or High Water Divestiture Obligation",
        "Limitations on Antitrust Efforts: Burdensome Condition",
        "Financing Cooperation Covenant Scope",
        "Capital Expenditures Covenant Threshold",
        "Dividend Restriction Covenant",
        "Indebtedness Incurrence Covenant",
        "Employee Compensation Covenant",
        "Litigation Control Covenant",
    ],
    "Remedies": [
        "Specific Performance Availability",
        "Specific Performance: Conditions to Financing",
        "Limitation of Liability for Willful Breach",
        "Exclusive Remedy Provision",
        "Remedies: Damages for Stockholder Premium",
        "Remedies: Election Between Fee and Damages",
        "Remedies: Jury Trial Waiver Scope",
        "Remedies: Forum Selection",
        "Remedies: Non-Recourse Parties",
        "Remedies: Injunction Without Bond",
        "Remedies: Survival of Fraud Claims",
        "Remedies: Liability Cap Amount",
    ],
    "Knowledge": [
        "Knowledge Definition: Constructive vs Actual",
        "Knowledge Definition: Listed Individuals",
        "Knowledge Definition: Due Inquiry Standard",
        "Knowledge Qualifier on Litigation Representation",
        "Knowledge Qualifier on Compliance Representation",
        "Knowledge Qualifier on Intellectual Property Representation",
        "Knowledge Qualifier on Environmental Representation",
        "Knowledge Qualifier on Material Contracts",
        "Knowledge Group Includes Subsidiary Officers",
        "Knowledge Definition: Scope of Inquiry Persons",
        "Knowledge Imputation Between Parties",
        "Knowledge Qualifier on Tax Representation",
    ],
    "General Information": [
        "Type of Consideration",
        "Structure of Transaction",
        "Specific Performance Carve-Out for Financing",
        "Governing Law Jurisdiction",
        "Outside Date Length",
        "Outside Date Extension Trigger",
        "Appraisal Rights Availability",
        "Voting Agreement Coverage",
        "Tender Offer Commencement Deadline",
        "Top-Up Option",
        "Section 251(h) Merger",
        "Treatment of Equity Awards",
        "Regulatory Filing Deadline",
    ],
}

_TEMPLATES = (
    "What is the {t}?",
    "Under the merger agreement, how is the {t} addressed?",
    "Does the agreement include the {t}, and if so, how is it framed?",
    "Which option best describes the {t}?",
)

_ANSWERS = (
    ("Yes", "No"),
    ("Mutual", "Target only", "Acquirer only"),
    ("At Closing Only", "At Signing and At Closing"),
    ("Reasonable best efforts", "Commercially reasonable efforts", "Best efforts"),
    ("Less than 3 business days", "3 to 5 business days", "More than 5 business days"),
    ("Cash", "Stock", "Mixed cash and stock"),
)


@dataclass(frozen=True)
class DealPoint:
    category: str
    deal_point_type: str
    question: str
    answers: tuple[str, ...]


def question_bank() -> list[DealPoint]:
    rng = random.Random(20240601)
    bank = []
    for category, types in _CATEGORIES.items():
        for t in types:
            q = rng.choice(_TEMPLATES).format(t=t)
            bank.append(DealPoint(category, f"{t} Answer", q, rng.choice(_ANSWERS)))
    return bank


def _company(rng: random.Random, used: set[str]) -> str:
    while True:
        name = "".join(rng.choice(_SYLLABLES) for _ in range(rng.randint(2, 3))).capitalize()
        if name not in used:
            used.add(name)
            return f"{name} {rng.choice(_SUFFIXES)}"


def _clause(rng: random.Random, n_words: int, newline_p: float = 0.15) -> str:
    """Legal-sounding text of about ``n_words`` words with defined terms, references and sub-clauses."""
    out = []
    words_left = n_words
    sub = 0
    while words_left > 0:
        k = min(words_left, rng.randint(12, 45))
        words = [rng.choice(_LEGAL) for _ in range(k)]
        if rng.random() < 0.3:
            i = rng.randrange(k)
            words[i] = '"' + " ".join(w.capitalize() for w in rng.sample(_LEGAL, 3)) + '"'
        if rng.random() < 0.25:
            words.insert(rng.randrange(len(words)), f"Section {rng.randint(1, 9)}.{rng.randint(1, 15)}({'abcdef'[rng.randrange(6)]})")
        if rng.random() < 0.3:
            i = rng.randrange(len(words))
            words[i] += ","
        sentence = " ".join(words)
        sentence = sentence[0].upper() + sentence[1:] + rng.choice((".", ";", ":"))
        if rng.random() < newline_p:
            sub += 1
            sentence = "\n(" + "abcdefghijklmnop"[sub % 16] + ") " + sentence
        out.append(sentence)
        words_left -= k
    return " ".join(out).strip()


def maud_like(
    rows: int = 25_000,
    seed: int = 0,
    median_words: int = 400,
    sigma: float = 0.7,
    max_words: int = 4000,
    column_order: tuple[str, ...] = MAUD_COLUMN_ORDER,
    newline_p: float = 0.15,
) -> list[dict[str, str]]:
    """Generate ``rows`` MAUD-shaped records, grouped by contract."""
    rng = random.Random(seed)
    bank = question_bank()
    used: set[str] = set()
    records: list[dict[str, str]] = []
    while len(records) < rows:
        contract = f"{_company(rng, used)} / {_company(rng, used)}"
        texts = {}
        for dp in bank:
            if len(records) >= rows:
                break
            if dp.category not in texts:
                n = min(max_words, max(5, int(rng.lognormvariate(0, sigma) * median_words)))
                texts[dp.category] = _clause(rng, n, newline_p)
            rec = {
                "text": texts[dp.category],
                "deal_point_category": dp.category,
                "deal_point_type": dp.deal_point_type,
                "question": dp.question,
                "answer": rng.choice(dp.answers),
                "contract_name": contract,
            }
            records.append({c: rec[c] for c in column_order})
    return records


def records_to_csv(records: list[dict[str, str]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    return buf.getvalue()


def maud_like_document(rows: int = 25_000, seed: int = 0, source_id: str = "maud-like", **kwargs
                       ) -> tuple[TabularDocument, list[MaudRecord]]:
    recs = maud_like(rows, seed, **kwargs)
    headers = list(recs[0]) if recs else list(MAUD_COLUMN_ORDER)
    sheet = make_sheet("default", headers, [[r[h] for h in headers] for r in recs])
    doc = TabularDocument(source_id, (sheet,))
    return doc, maud_records(doc, MaudColumns())


def random_table(rng: random.Random, n_rows: int, n_cols: int, max_words: int = 30, empty_p: float = 0.2,
                 name: str = "default") -> Sheet:
    """Small random sheet for property tests: short words, punctuation, some empty cells."""
    alphabet = "abcdefghijklmnopqrstuvwxyz0123456789"
    punct = ",.;()-/'"

    def cell() -> str:
        if rng.random() < empty_p:
            return ""
        n = rng.randint(1, max_words)
        words = []
        for _ in range(n):
            w = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))
            if rng.random() < 0.2:
                w += rng.choice(punct)
            words.append(w)
        return " ".join(words)

    headers = [f"h{j}" for j in range(n_cols)]
    return make_sheet(name, headers, [[cell() for _ in range(n_cols)] for _ in range(n_rows)])


def wide_rows_document(n_rows: int, seed: int = 0, n_cols: int = 8, words_per_cell: int = 12) -> TabularDocument:
    """Uniform synthetic table used for speed and scaling measurements."""
    rng = random.Random(seed)
    vocab = _LEGAL
    headers = [f"field_{j}" for j in range(n_cols)]
    rows = [
        [" ".join(rng.choice(vocab) for _ in range(rng.randint(1, 2 * words_per_cell))) for _ in range(n_cols)]
        for _ in range(n_rows)
    ]
    return TabularDocument(f"synthetic-{n_rows}", (make_sheet("default", headers, rows),))

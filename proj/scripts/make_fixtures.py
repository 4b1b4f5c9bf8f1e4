#!/usr/bin/env python3
"""Regenerates the deterministic fixture sets under tests/fixtures/ and demo/.

    python3 scripts/make_fixtures.py            # all sets
    python3 scripts/make_fixtures.py labeled    # one set

Every set is seeded, so rerunning produces identical files.
"""
import json
import random
import shutil
import sys
from datetime import datetime, timedelta, timezone
from decimal import Decimal
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "tests" / "fixtures"
DEMO = ROOT / "demo"

sys.path.insert(0, str(ROOT / "tests" / "oracle"))
import make_address_vectors as oracle  # noqa: E402

COINS = [("btc", "bitcoin"), ("eth", "ethereum"), ("bnb", "binance coin"), ("ada", "cardano"),
         ("xrp", "ripple"), ("doge", "dogecoin"), ("shib", "shiba inu"), ("dot", "polkadot"),
         ("sol", "solana"), ("babydoge", "baby doge")]
PEOPLE = ["elon musk", "vitalik buterin", "cz binance", "michael saylor", "brad garlinghouse",
          "charles hoskinson", "jack dorsey", "cathie wood"]
SCAM_EMOJI = ["🚀", "💰", "🎁", "🔥", "💸", "🤑", "✅", "⚡", "🎉", "💎"]
TLDS = ["com", "info", "net", "org", "io", "live", "site", "online", "xyz", "app"]
AMOUNTS = ["5000", "10000", "20000", "50000", "100000", "250", "1000", "2500", "15,000", "1 million"]


def write_jsonl(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def scam_domain(rng: random.Random) -> str:
    coin = rng.choice(COINS)[0]
    stem = rng.choice([f"{coin}x2", f"{coin}-event", f"merge-{coin}x2", f"{coin}giveaway",
                       f"official-{coin}", f"{coin}promo", f"get{coin}", f"{coin}-double",
                       f"crypto{coin}", f"{coin}drop"])
    return f"{stem}{rng.randint(1, 99)}.{rng.choice(TLDS)}"


def scam_text(rng: random.Random) -> str:
    sym, name = rng.choice(COINS)
    coin = rng.choice([sym.upper(), sym, name, name.title()])
    amount = rng.choice(AMOUNTS)
    person = rng.choice(PEOPLE).title()
    emo = rng.choice(SCAM_EMOJI)
    title = rng.choice([
        f"{amount} {coin}",
        f"{amount} {coin} giveaway",
        f"{coin} x2 event {emo}",
        f"{emo}{emo} {person} {coin} giveaway {emo}{emo}",
        f"Free {amount} {coin}",
        f"{coin} 2x promo",
        f"{person} giving away {amount} {coin}",
        f"Official {coin} airdrop {emo}",
        f"{coin} double event",
        f"{emo} {amount} {coin} {emo}",
    ])
    desc = rng.choice([
        f"Giveaway! {scam_domain(rng)}",
        f"send {coin} and get 2x back {emo} {scam_domain(rng)}",
        f"{person} is giving away {amount} {coin}, participate now at https://{scam_domain(rng)}",
        f"u send 1 {coin} u get 2 back, hurry {emo} {scam_domain(rng)}",
        f"limited time x2 event, all transactions doubled {scam_domain(rng)}",
        f"claim ur free {coin} now {emo}{emo} www.{scam_domain(rng)}",
        f"to celebrate the merge we give away {amount} {coin} {scam_domain(rng)}",
        f"the biggest {coin} giveaway, only today {emo} {scam_domain(rng)}",
        "",
    ])
    return (title + " " + desc).strip()


def normal_text(rng: random.Random) -> str:
    sym, name = rng.choice(COINS)
    topic = rng.choice(["photography", "jazz", "python devs", "machine learning", "cooking",
                        "formula 1", "climate science", "indie games", "football", "astronomy",
                        "startups", "design", "ux research", "open source", "history",
                        "marathon runners", "chess", "poetry", "film critics", "nba"])
    city = rng.choice(["berlin", "lagos", "tokyo", "austin", "lisbon", "seoul", "toronto",
                       "nairobi", "lima", "oslo"])
    title = rng.choice([
        f"{topic.title()}",
        f"{topic} people",
        f"{city.title()} {topic}",
        f"{name.title()} developers",
        f"{sym.upper()} research",
        f"{name} news",
        f"favorite {topic} accounts",
        f"{topic} 📚",
        f"my {topic} list",
        f"book giveaway winners",
        f"{city} friends",
        f"{name} core contributors",
    ])
    desc = rng.choice([
        f"people i follow for {topic}",
        f"accounts sharing {topic} news from {city}",
        f"researchers working on {name} scaling and security",
        f"{sym.upper()} price analysis and market commentary, not financial advice",
        f"a list of {topic} folks, thx for the great content",
        f"journalists covering {name} and blockchain policy",
        f"monthly book giveaway for {topic} fans, winners announced here",
        f"{topic} meetups in {city}",
        f"devs building on {name}, see docs.{name.replace(' ', '')}.org",
        f"great {topic} threads ☕",
        "",
    ])
    return (title + " " + desc).strip()


def make_labeled() -> None:
    """Labeled mini-corpus: 500 unique texts, 140 scam (28%)."""
    rng = random.Random(20231)
    seen = set()
    rows = []
    def add(label, gen, n):
        count = 0
        while count < n:
            t = gen(rng)
            if t.lower() in seen or len(t.split()) < 2:
                continue
            seen.add(t.lower())
            rows.append({"text": t, "label": label})
            count += 1
    add("scam", scam_text, 140)
    add("normal", normal_text, 360)
    rng.shuffle(rows)
    write_jsonl(FIX / "labeled" / "mini_corpus.jsonl", rows)


def put_page(store: Path, url: str, status: int = 200, body: str = "", headers=None, error=None,
             fetched_at: str = "2022-12-26T10:00:00Z") -> None:
    """Writes one PageStore entry (metadata JSON + raw body)."""
    import hashlib
    key = hashlib.sha256(url.encode()).hexdigest()[:32]
    store.mkdir(parents=True, exist_ok=True)
    meta = {"url": url, "status": status, "headers": headers or {}, "error": error,
            "fetched_at": fetched_at, "redirect_chain": []}
    (store / f"{key}.json").write_text(json.dumps(meta, indent=1) + "\n", encoding="utf-8")
    (store / f"{key}.body").write_bytes(body.encode("utf-8"))


MERGE_PAGE = """<!doctype html>
<html><head><title>ETH Merge Giveaway</title></head>
<body>
<h1>Ethereum Merge x2 Event</h1>
<p>To celebrate the merge we are giving away 5,000 ETH. Send from 0.1 to 50 ETH
to the address below and receive double back instantly.</p>
<div class="addr">0xc4BE4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d</div>
<p>Also accepting Bitcoin: <code>13i79MkvCijL6MqjHL1ojyqmDREKHiYdbk</code></p>
<script>var tx = "0x154a98e68828721ba1f0ca70ee2787d0ebb98ebf2926a30cb77cb25017ac8e80";</script>
</body></html>
"""


def make_pages() -> None:
    """Page fixtures: a live giveaway page, a dead host, and redirect chains."""
    store = FIX / "pages"
    put_page(store, "https://merge-ethx2.info", body=MERGE_PAGE, headers={"content-type": "text/html"})
    put_page(store, "https://dead-giveaway.example.com", error="connect")
    put_page(store, "https://slow-giveaway.net", error="timeout")
    # six hops: loop.test/0 -> ... -> loop.test/6 (never reached)
    for i in range(6):
        put_page(store, f"https://loop.test/{i}", status=302, headers={"location": f"/{i + 1}"})
    put_page(store, "https://loop.test/6", body="unreachable")
    # five hops then a page
    for i in range(5):
        put_page(store, f"https://hops.test/{i}", status=301, headers={"location": f"https://hops.test/{i + 1}"})
    put_page(store, "https://hops.test/5", body="<p>BNB giveaway 0x52908400098527886E0F7030069857D2E4169EE7</p>")
    put_page(store, "https://gone.test", status=404, body="not found")


def fake_address(chain: str, rng: random.Random) -> str:
    """A checksum-valid address built with the oracle encoders."""
    if chain == "BTC":
        return oracle.b58check(bytes([rng.choice([0, 5])]) + rng.randbytes(20), oracle.BTC_ALPHA)
    if chain in ("ETH", "BNB"):
        return oracle.eip55(rng.randbytes(20))
    if chain == "ADA":
        payload = b"\x61" + rng.randbytes(28)
        return oracle.bech32_create("addr", oracle.convertbits(payload, 8, 5), 1)
    return oracle.b58check(b"\x00" + rng.randbytes(20), oracle.XRP_ALPHA)


def fake_txid(chain: str, rng: random.Random) -> str:
    h = rng.randbytes(32).hex()
    return "0x" + h if chain in ("ETH", "BNB") else (h.upper() if chain == "XRP" else h)


def iso(t: datetime) -> str:
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def transfer(chain, tx, src, dst, amount: Decimal, t: datetime) -> dict:
    return {"chain": chain, "tx_hash": tx, "from_addr": src, "to_addr": dst,
            "amount": format(amount.normalize(), "f"), "timestamp": iso(t)}


def write_ledgers(root: Path, ledgers, page_size: int = 50) -> None:
    """ledgers: list of (chain, address, transfers). Writes index.json + JSONL pages."""
    entries = []
    for chain, addr, txs in ledgers:
        pages = []
        chunks = [txs[i:i + page_size] for i in range(0, len(txs), page_size)] or [[]]
        for n, chunk in enumerate(chunks, 1):
            rel = f"{chain.lower()}/{addr}-{n}.jsonl"
            (root / rel).parent.mkdir(parents=True, exist_ok=True)
            (root / rel).write_text("".join(json.dumps(t) + "\n" for t in chunk), encoding="utf-8")
            pages.append(rel)
        entries.append({"address": addr, "chain": chain, "pages": pages, "total": len(txs)})
    write_json(root / "index.json", {"addresses": entries})


def write_prices(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["chain,date,low_usd,high_usd"] + [f"{c},{d},{lo},{hi}" for c, d, lo, hi in sorted(rows)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


CASE_ETH = "0xc4BE4a14d4E61b2DA5dd7eE64cbA8E85766dFD3d"
CASE_BTC = "13i79MkvCijL6MqjHL1ojyqmDREKHiYdbk"
CASE_BIG_TX = "0x154a98e68828721ba1f0ca70ee2787d0ebb98ebf2926a30cb77cb25017ac8e80"


def make_case_study() -> None:
    """Case-study ledgers: four inbound ETH transfers totalling 130.85, one
    cash-out, and an empty Bitcoin history. Senders and prices are synthetic."""
    rng = random.Random(1224)
    root = FIX / "ledgers" / "case_study"
    day = lambda d, h: datetime(2022, 12, d, h, 0, tzinfo=timezone.utc)  # noqa: E731
    inbound = [(Decimal("0.5"), day(21, 9)), (Decimal("0.25"), day(22, 14)),
               (Decimal("130"), day(24, 7)), (Decimal("0.1"), day(26, 18))]
    txs = []
    for amount, t in inbound:
        tx = CASE_BIG_TX if amount == 130 else fake_txid("ETH", rng)
        txs.append(transfer("ETH", tx, fake_address("ETH", rng), CASE_ETH, amount, t))
    txs.append(transfer("ETH", fake_txid("ETH", rng), CASE_ETH, fake_address("ETH", rng),
                        Decimal("130.5"), day(27, 3)))
    write_ledgers(root, [("ETH", CASE_ETH, txs), ("BTC", CASE_BTC, [])], page_size=3)
    write_prices(root / "prices.csv", [
        ("ETH", "2022-12-21", "1205.10", "1222.40"), ("ETH", "2022-12-22", "1198.30", "1221.90"),
        ("ETH", "2022-12-24", "1200", "1250"), ("ETH", "2022-12-26", "1212.20", "1228.60"),
    ])


# Published per-chain loss rows: chain -> (#scam addresses, #victim txs, #victim addresses, total amount,
# usd min, usd max, amount decimals, amount of the balancing transfer).
# Cardano lists 10 txs from 11 addresses; the fixture uses 10 addresses.
LOSS_ROWS = {
    "BTC": (64, 72, 54, Decimal("5.39958"), Decimal(85200), Decimal(169300), 8, Decimal("0.5")),
    "ETH": (48, 379, 289, Decimal("313.92"), Decimal(311900), Decimal(665500), 6, Decimal("1")),
    "BNB": (5, 5, 4, Decimal("8.50714"), Decimal(1700), Decimal(3000), 5, Decimal("0.5")),
    "ADA": (2, 10, 10, Decimal("42342"), Decimal(10300), Decimal(27200), 2, Decimal("100")),
    "XRP": (2, 8, 7, Decimal("13030.9"), Decimal(4000), Decimal(7000), 1, Decimal("100")),
}
LOSS_ROW_DAYS = {"BTC": ("2022-08-14", "2022-11-02"), "ETH": ("2022-09-15", "2022-12-24"),
               "BNB": ("2022-10-08", "2023-02-11"), "ADA": ("2022-04-03", "2022-08-19"),
               "XRP": ("2022-05-21", "2023-03-29")}


def split_amount(total: Decimal, n: int, places: int, rng: random.Random):
    """n positive amounts with `places` decimals summing exactly to total."""
    q = Decimal(1).scaleb(-places)
    weights = [rng.uniform(0.2, 3.0) for _ in range(n)]
    parts = [(total * Decimal(w) / Decimal(sum(weights))).quantize(q) for w in weights]
    parts[parts.index(max(parts))] += total - sum(parts)
    assert all(p > 0 for p in parts) and sum(parts) == total
    return parts


def make_loss_rows() -> None:
    """Ledgers whose per-chain victim figures reproduce the published loss rows, plus the scam address list."""
    rng = random.Random(7007)
    root = FIX / "ledgers" / "loss_rows"
    ledgers, prices, scam_rows = [], [], []
    shared_victim = oracle.eip55(rng.randbytes(20))  # pays on both ETH and BNB
    for chain, (n_scam, n_tx, n_victim, total, usd_min, usd_max, places, last) in LOSS_ROWS.items():
        scams = [fake_address(chain, rng) for _ in range(n_scam)]
        scam_rows += [(chain, a) for a in scams]
        victims = [fake_address(chain, rng) for _ in range(n_victim)]
        if chain in ("ETH", "BNB"):
            victims[0] = shared_victim
        senders = victims + [rng.choice(victims) for _ in range(n_tx - n_victim)]
        rng.shuffle(senders)
        amounts = split_amount(total - last, n_tx - 1, places, rng) + [last]

        bulk_day, last_day = LOSS_ROW_DAYS[chain]
        bulk = total - last
        low1 = (usd_min / total).quantize(Decimal("0.0001"))
        high1 = (usd_max / total).quantize(Decimal("0.0001"))
        low2 = (usd_min - bulk * low1) / last
        high2 = (usd_max - bulk * high1) / last
        assert 0 < low2 <= high2 and bulk * low1 + last * low2 == usd_min and bulk * high1 + last * high2 == usd_max
        prices += [(chain, bulk_day, low1, high1), (chain, last_day, format(low2.normalize(), "f"),
                                                     format(high2.normalize(), "f"))]

        per_scam = {a: [] for a in scams}
        d0 = datetime.fromisoformat(bulk_day).replace(tzinfo=timezone.utc)
        d1 = datetime.fromisoformat(last_day).replace(tzinfo=timezone.utc)
        for i, (src, amount) in enumerate(zip(senders, amounts)):
            t = d1 + timedelta(hours=12) if i == n_tx - 1 else d0 + timedelta(seconds=97 * i)
            dst = rng.choice(scams)
            per_scam[dst].append(transfer(chain, fake_txid(chain, rng), src, dst, amount, t))
        # cash-outs to addresses outside the scam set
        for dst_scam in rng.sample(scams, min(3, n_scam)):
            got = sum((Decimal(t["amount"]) for t in per_scam[dst_scam]), Decimal(0))
            if got > 0:
                per_scam[dst_scam].append(transfer(chain, fake_txid(chain, rng), dst_scam, fake_address(chain, rng),
                                                   got, d1 + timedelta(days=1)))
        for a in scams:
            per_scam[a].sort(key=lambda t: t["timestamp"])
            ledgers.append((chain, a, per_scam[a]))
    write_ledgers(root, ledgers)
    write_prices(root / "prices.csv", prices)
    (root / "addresses.tsv").write_text("".join(f"{c}\t{a}\n" for c, a in scam_rows), encoding="utf-8")


def list_record(list_id: str, title: str, description: str, creator: str, created: datetime,
                members, followers: int) -> dict:
    return {"list_id": list_id, "title": title, "description": description, "creator_id": creator,
            "created_at": iso(created), "member_ids": members, "follower_count": followers}


def split_title(text: str, rng: random.Random):
    words = text.split()
    cut = rng.randint(1, max(1, min(4, len(words) - 1)))
    return " ".join(words[:cut]), " ".join(words[cut:])


def make_scamrate() -> None:
    """2000 lists with 270 planted scam texts (13.5%)."""
    rng = random.Random(135)
    total, n_scam = 2000, 270
    labels = ["scam"] * n_scam + ["normal"] * (total - n_scam)
    rng.shuffle(labels)
    seen, rows, truth = set(), [], []
    start = datetime(2022, 1, 1, tzinfo=timezone.utc)
    for i, label in enumerate(labels):
        while True:
            text = scam_text(rng) if label == "scam" else normal_text(rng)
            if text.lower() not in seen and len(text.split()) >= 2:
                break
        seen.add(text.lower())
        title, desc = split_title(text, rng)
        members = [f"m{rng.randint(1, 5000)}" for _ in range(rng.randint(0, 12))]
        rows.append(list_record(f"S{i:05d}", title, desc, f"C{rng.randint(1, 1500)}",
                                start + timedelta(minutes=263 * i), sorted(set(members)), rng.randint(0, 6)))
        truth.append({"list_id": f"S{i:05d}", "label": label})
    write_jsonl(FIX / "scamrate" / "corpus.jsonl", rows)
    write_jsonl(FIX / "scamrate" / "truth.jsonl", truth)


DEMO_URL_HOST = "vitalik-x2event.live"


def make_demo() -> None:
    """Offline demo: 12 lists (2 scam), 1 page, 1 ledger with 2 victim transfers."""
    rng = random.Random(2022)
    scam_addr = oracle.eip55(rng.randbytes(20))
    lists = [
        ("D01", "Ethereum researchers", "people working on ethereum scaling and security"),
        ("D02", "5000 ETH giveaway", f"Vitalik is giving away 5000 ETH, send 1 get 2 back {DEMO_URL_HOST}"),
        ("D03", "Jazz", "favorite jazz musicians and critics"),
        ("D04", "Berlin photography", "photographers sharing street photography from berlin"),
        ("D05", "BTC research", "BTC price analysis and market commentary, not financial advice"),
        ("D06", "Chess", "great chess threads \u2615"),
        ("D07", "\U0001F680\U0001F680 Ethereum x2 event \U0001F680\U0001F680",
         f"claim ur free ETH now, all transactions doubled https://{DEMO_URL_HOST}"),
        ("D08", "Astronomy people", "accounts sharing astronomy news from oslo"),
        ("D09", "Cardano developers", "devs building on cardano, see docs.cardano.org"),
        ("D10", "Indie games", "a list of indie games folks, thx for the great content"),
        ("D11", "Climate science", "researchers and journalists covering climate science"),
        ("D12", "Book giveaway winners", "monthly book giveaway for poetry fans, winners announced here"),
    ]
    start = datetime(2022, 8, 2, 13, 0, tzinfo=timezone.utc)
    rows = []
    for i, (lid, title, desc) in enumerate(lists):
        members = sorted({f"u{rng.randint(1, 40)}" for _ in range(rng.randint(2, 8))})
        rows.append(list_record(lid, title, desc, f"A{i % 10:02d}",
                                start + timedelta(days=9 * i, minutes=17 * i), members, i % 5))
    write_jsonl(DEMO / "lists.jsonl", rows)

    page = f"""<!doctype html><html><head><title>Vitalik Buterin Official Event</title></head>
<body><h1>Ethereum x2 Event</h1>
<p>Send from 0.5 to 100 ETH and receive double back. Participate now:</p>
<p class="wallet">{scam_addr}</p>
</body></html>
"""
    put_page(DEMO / "pages", f"https://{DEMO_URL_HOST}", body=page, headers={"content-type": "text/html"},
             fetched_at="2022-09-01T08:00:00Z")

    v1, v2 = oracle.eip55(rng.randbytes(20)), oracle.eip55(rng.randbytes(20))
    t = lambda d, h: datetime(2022, 9, d, h, 0, tzinfo=timezone.utc)  # noqa: E731
    txs = [transfer("ETH", fake_txid("ETH", rng), v1, scam_addr, Decimal("1.5"), t(3, 10)),
           transfer("ETH", fake_txid("ETH", rng), v2, scam_addr, Decimal("0.25"), t(5, 21)),
           transfer("ETH", fake_txid("ETH", rng), scam_addr, oracle.eip55(rng.randbytes(20)),
                    Decimal("1.75"), t(6, 2))]
    write_ledgers(DEMO / "ledgers", [("ETH", scam_addr, txs)])
    write_prices(DEMO / "prices.csv", [("ETH", "2022-09-03", "1550.00", "1602.50"),
                                       ("ETH", "2022-09-05", "1575.40", "1620.00")])
    shutil.copyfile(FIX / "labeled" / "mini_corpus.jsonl", DEMO / "labeled.jsonl")


SETS = {"labeled": make_labeled, "pages": make_pages, "case_study": make_case_study,
        "loss_rows": make_loss_rows, "scamrate": make_scamrate, "demo": make_demo}


def main() -> None:
    names = sys.argv[1:] or list(SETS)
    for n in names:
        SETS[n]()
        print(f"generated {n}")


if __name__ == "__main__":
    main()

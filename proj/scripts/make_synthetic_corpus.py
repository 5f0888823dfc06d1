#!/usr/bin/env python3
"""Generate data/corpus/synthetic.jsonl: labelled finance tweets with planted class signals.

Each tweet combines phrases from its class pool, sometimes one phrase from
another class (cross-class noise), filler words and a ticker. Class sizes
follow the 1198/669/1289/1803 distribution scaled to 500. Every word is
checked against the bundled frequency lexicon so preprocessing keeps it.
"""

import json
import pathlib
import random
import re

ROOT = pathlib.Path(__file__).resolve().parent.parent
RES = ROOT / "data" / "resources"
OUT = ROOT / "data" / "corpus" / "synthetic.jsonl"

SEED = 20201
SIZES = {"P+": 121, "S+": 67, "N": 130, "A-": 182}
NOISE = 0.45          # chance of one phrase from another class
MAX_JACCARD = 0.6     # on approximate lemma sets

TICKERS = ["SAN", "BBVA", "ITX", "TEF", "IBE", "REP", "AMS", "FER", "ACS", "GRF", "MAP", "ELE",
           "NTGY", "AENA", "CABK", "SAB", "IAG", "MEL", "MTS", "ENG", "REE", "CLNX", "SLR", "NFLX",
           "AAPL", "TSLA", "AMZN", "MSFT", "GOOG", "NVDA"]
# a few names dominate, as on a real timeline
TICKER_WEIGHTS = [8, 6, 5, 5, 4, 4, 3, 3, 3, 3, 2, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1, 3, 3, 4, 2, 1, 1, 2]

POOLS = {
    "P+": [
        "podría subir mucho", "subirá pronto", "buena oportunidad de compra", "ocasión inmejorable",
        "gran potencial alcista", "objetivo en máximos", "entrada clara", "aprovechar para comprar",
        "despegará", "romperá la resistencia", "comprar barato", "valor infravalorado",
        "esto va a ser un cohete", "rumbo a la luna", "recorrido alcista enorme", "pelotazo a la vista",
        "alcanzará el objetivo", "doblará su precio", "subiría con fuerza", "apostar por el rebote",
        "chollo para largo plazo", "se disparará", "hay que entrar ya", "potencial de subida",
        "multiplicará su valor", "esperar el giro alcista", "entrada en soporte", "superará máximos",
        "gran ocasión de entrada", "posible ruptura alcista", "recomendar comprar", "ganará mucho",
    ],
    "S+": [
        "sube con fuerza", "cierra en verde", "buenos resultados", "reparte dividendo",
        "ganancias sólidas", "marca máximos", "sesión espectacular", "subió bastante",
        "celebrar la subida", "recupera terreno", "supera la resistencia", "beneficio récord",
        "gran cierre", "excelente trimestre", "lidera las subidas", "ventas excelentes",
        "buen dato de ingresos", "dividendazo", "acumula ganancias", "mejora los beneficios",
        "brilla hoy", "subida limpia", "repunte sólido", "cifras positivas",
        "cotiza en máximos", "enhorabuena a los accionistas", "muy buen resultado", "gana terreno",
    ],
    "N": [
        "presenta resultados", "junta de accionistas", "calendario de la sesión", "dato de empleo",
        "cotiza plano", "informe trimestral", "apertura de la sesión", "cierre de la jornada",
        "volumen normal", "agenda del día", "publica cifras", "reunión del consejo",
        "precio de cierre", "informa al mercado", "comunica un acuerdo", "consulta el informe",
        "análisis del sector", "nivel lateral", "sin cambios", "rango estable",
        "presentación a inversores", "fecha de pago", "hilo con datos", "gráfico semanal",
        "previsión anual", "emisión de bonos", "ampliación de capital", "revisar la cartera",
    ],
    "A-": [
        "cuidado con la caída", "riesgo alto", "desplome total", "pérdidas fuertes",
        "tendencia bajista", "hay que vender", "trampa alcista", "burbuja clara",
        "alerta roja", "se hunde", "peligro de corrección", "mucha deuda",
        "cae sin freno", "pánico en el parqué", "rompe soportes", "malos resultados",
        "pierde el soporte", "cuidado señores", "precaución máxima", "miedo en el mercado",
        "caro para vender", "volatilidad peligrosa", "sobrecompra clara", "castigo fuerte",
        "crisis en el sector", "preocupa la deuda", "cierra en rojo", "bajada peligrosa",
        "stop de pérdidas", "presión bajista", "recesión a la vista", "no aguanta",
    ],
}

FILLER = ["mercado", "valor", "gente", "señores", "ojo", "semana", "atención", "gráfico", "sector",
          "banca", "energía", "hilo", "tema", "nivel", "zona", "plazo", "inversores", "cartera",
          "bolsa", "sesión", "precio", "análisis", "idea", "momento", "empresa", "acción", "títulos"]

WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


def load_lexicon():
    words = set()
    for line in (RES / "es_frequency.tsv").read_text(encoding="utf-8").splitlines():
        if line and not line.startswith("#"):
            words.add(line.split("\t")[0])
    return words


def load_lemmas():
    lemmas = {}
    for line in (RES / "lemmas.tsv").read_text(encoding="utf-8").splitlines():
        if line and not line.startswith("#"):
            parts = line.split("\t")
            lemmas.setdefault(parts[0], parts[1])
    return lemmas


def load_stopwords():
    stop = set((RES / "stopwords.txt").read_text(encoding="utf-8").split())
    keep = set((RES / "keepwords.txt").read_text(encoding="utf-8").split())
    return stop - keep


def approx_tokens(text, lemmas, stop):
    out = set()
    for w in WORD_RE.findall(text.lower()):
        if w in stop:
            continue
        out.add(lemmas.get(w, w))
    return out


def main():
    lexicon = load_lexicon()
    lemmas = load_lemmas()
    stop = load_stopwords()

    missing = sorted({w for pool in POOLS.values() for p in pool for w in WORD_RE.findall(p.lower())
                      if w not in lexicon} | {w for w in FILLER if w not in lexicon})
    if missing:
        raise SystemExit("words missing from the lexicon: " + " ".join(missing))

    rng = random.Random(SEED)
    labels = [lab for lab, n in SIZES.items() for _ in range(n)]
    rng.shuffle(labels)

    rows, seen = [], []
    for i, label in enumerate(labels):
        for _ in range(1000):
            phrases = rng.sample(POOLS[label], 2)
            if rng.random() < NOISE:
                other = rng.choice([c for c in POOLS if c != label])
                phrases.append(rng.choice(POOLS[other]))
            phrases += rng.sample(FILLER, rng.randint(1, 2))
            rng.shuffle(phrases)
            ticker = rng.choices(TICKERS, TICKER_WEIGHTS)[0]
            body = " ".join(phrases)
            if rng.random() < 0.25:
                sign = "+" if label in ("P+", "S+") else "-"
                if rng.random() < 0.2:
                    sign = "-" if sign == "+" else "+"
                body += f" {sign}{rng.randint(1, 9)}.{rng.randint(0, 99):02d}%"
            text = f"${ticker} {body}" if rng.random() < 0.7 else f"{body} ${ticker}"
            if rng.random() < 0.2:
                text += "!"
            toks = approx_tokens(text, lemmas, stop)
            if all(len(toks & s) / len(toks | s) < MAX_JACCARD for s in seen):
                break
        else:
            raise SystemExit(f"could not place tweet {i} without a near duplicate")
        seen.append(toks)
        rows.append({"id": i + 1, "text": text, "tickers": [ticker], "emotion": label})

    OUT.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")
    print(f"wrote {len(rows)} tweets to {OUT.relative_to(ROOT)}")


if __name__ == "__main__":
    main()

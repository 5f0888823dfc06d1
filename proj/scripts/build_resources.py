#!/usr/bin/env python3
"""Regenerates the bundled Spanish resources under data/resources/.

The frequency list is a small hand-curated stand-in for a real reference
corpus: counts follow a rough Zipf curve by tier, not real measurements.
Verb paradigms are expanded from a short table so that tense tags are
available for the temporal features.
"""
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "resources"

FUNCTION_WORDS = """
de la que el en y a los se del las un por con no una su para es al lo como más o pero sus le ha me
si sin sobre este ya entre cuando todo esta ser son dos también fue había era muy hasta desde está mi
porque qué sólo solo han yo hay vez puede todos así nos ni parte tiene él uno donde bien ahora cada e
otro después te otros aunque esa eso hace otra tan durante siempre tanto ella tres sí sido menos antes
contra sino nada estaba estos ante unos les algo hacia ellos mientras además quien esto están pues
entonces todas estas sea tenía nunca aquí estar tras ello cualquier aún fuera usted nadie mí tu allí
eran unas mis incluso través todavía esos nosotros muchas alguna algunas algunos muchos cual cuál
estamos estoy estás estaban estado estados estuvo son somos soy eres sois fui fuimos fueron siendo
he has hemos habéis habían habrá haya hubo haber ese esas aquel aquella aquellos aquellas nuestro
nuestra nuestros nuestras vuestro vuestra tuyo tuya suyo suya mío mía cuyo cuya tú ti os vosotros
ellas nosotras quién dónde cómo cuánto cuánta cuántos cuántas cuándo ambos ambas mucho mucha tal tales
demás mismo misma mismos mismas cierto cierta ciertos ciertas varios varias sendos según mediante
hasta luego pronto tampoco apenas casi ya aún quizá quizás acaso
"""

GENERAL = """
año años día días semana semanas mes meses hora horas minuto minutos tiempo momento vez veces
mundo país países vida casa gente persona personas hombre mujer señor señores señora amigo amigos
historia cosa cosas forma manera caso lado punto parte partes idea problema problemas cuenta
nombre número grupo sistema ciudad centro final principio inicio fin medio lugar sitio tipo
información noticia noticias tema temas razón verdad duda dudas cuidado precaución atención paciencia
humor risa broma alegría miedo pánico calma nervios ánimo suerte fe esperanza ojo ojos mano manos
valencia madrid barcelona españa europa américa china japón alemania francia londres bilbao plaza
calle vía camino viaje puerta ventana mesa libro papel carta mensaje hilo cuenta perfil foto vídeo
bueno buena buenos buenas malo mala malos malas mejor peor grande gran grandes pequeño pequeña
nuevo nueva nuevos nuevas viejo vieja primero primera primer último última segundo segunda tercero
claro clara fácil difícil importante posible imposible seguro segura general especial normal
largo larga corto corta alto alta altos altas bajo baja bajos bajas fuerte fuertes débil débiles
próximo próxima próximos próximas siguiente anterior actual actuales reciente recientes
total enorme increíble brutal tremendo tremenda interesante curioso curiosa raro rara
mañana tarde noche hoy ayer pasado siempre nunca jamás ahora antes después pronto tarde temprano
aquí allí arriba abajo encima debajo cerca lejos dentro fuera delante detrás
gracias hola saludos buenas venga vale ojalá enhorabuena felicidades
alguien nadie todo todos todas cada otro otra
rojo roja verde verdes negro negra blanco blanca azul
comercial social nacional internacional mundial global local europeo europea americano americana
oficial público pública privado privada político política económico económica
firma acuerdo acuerdos contrato contratos ley leyes norma reglas gobierno presidente ministro
banco bancos empresa empresas compañía sector sectores industria negocio negocios
racha tendencia tendencias ciclo fase etapa nivel niveles zona zonas rango
bajista bajistas alcista alcistas lateral laterales
humor trabajo equipo proyecto plan planes estrategia estrategias decisión decisiones
semana finde lunes martes miércoles jueves viernes sábado domingo
enero febrero marzo abril mayo junio julio agosto septiembre octubre noviembre diciembre
cero uno dos tres cuatro cinco seis siete ocho nueve diez cien mil millón millones
poco poca pocos pocas demasiado bastante mitad doble
dios madre padre hijo hija familia
"""

FINANCE = """
bolsa bolsas mercado mercados acción acciones valor valores título títulos activo activos
índice índices ibex selectivo parqué cotización cotizaciones precio precios cierre apertura
sesión sesiones jornada jornadas inversor inversores inversión inversiones analista analistas
cartera carteras dividendo dividendos beneficio beneficios ganancia ganancias pérdida pérdidas
resultado resultados ingresos ventas deuda deudas crédito créditos interés intereses tipos
euro euros dólar dólares céntimo céntimos moneda divisa divisas
soporte soportes resistencia resistencias objetivo objetivos techo suelo máximo máximos mínimo
mínimos media medias volumen volumenes hueco gráfico gráficos vela velas figura patrón canal
subida subidas bajada bajadas caída caídas desplome desplomes corrección correcciones rebote rebotes
repunte repuntes giro giros ruptura rupturas rally recorrido potencial margen márgenes
riesgo riesgos peligro peligros alerta alertas aviso avisos trampa trampas burbuja crisis
recesión inflación pánico miedo euforia volatilidad incertidumbre tensión presión
oportunidad oportunidades ocasión ocasiones chollo entrada entradas salida salidas compra compras
venta stop stops orden órdenes posición posiciones largo largos corto cortos
junta accionistas accionista consejo informe informes calendario agenda presentación
dato datos cifra cifras trimestre trimestres semestre anual previsión previsiones
ampliación capital opa fusión fusiones compra split emisión bono bonos prima
banca petróleo energía eléctricas eléctrica constructoras aseguradoras farmacéutica
tecnológicas tecnológica tecnología automóvil automoción turismo hoteles aerolíneas
fondo fondos gestora plazo plazos corto medio largo futuro futuros opciones
inmejorable excelente excelentes espectacular espectaculares sólido sólida sólidos sólidas
fuerte débil positivo positiva positivos positivas negativo negativa negativos negativas
verde verdes rojo rojos neutral estable estables plano plana
barato barata baratos baratas caro cara caros caras infravalorado infravalorada
sobrecompra sobreventa
"""

ADVERBS = """
muy bien mal mejor peor casi siempre nunca jamás ya todavía aún también tampoco quizá quizás
pronto tarde temprano hoy ayer mañana ahora antes después luego aquí allí arriba abajo cerca lejos
bastante demasiado poco mucho apenas solo sólo claramente rápidamente lentamente fuertemente
totalmente absolutamente realmente seguramente probablemente posiblemente definitivamente
finalmente actualmente recientemente simplemente especialmente claramente
"""

EXTRA_ADVERB_FORMS = """
claramente rápidamente lentamente fuertemente totalmente absolutamente realmente seguramente
probablemente posiblemente definitivamente finalmente actualmente recientemente simplemente
especialmente ligeramente levemente
"""

# Infinitive -> (kind, base frequency). Regular paradigms are generated.
REGULAR_VERBS = {
    "subir": 9000, "bajar": 8000, "comprar": 7000, "vender": 6000, "ganar": 6000,
    "cotizar": 2500, "alcanzar": 3000, "superar": 3500, "recuperar": 3000, "aguantar": 1500,
    "disparar": 1200, "despegar": 800, "mejorar": 3000, "empeorar": 800, "presentar": 4000,
    "publicar": 2500, "anunciar": 2500, "pagar": 3500, "repartir": 1500, "entrar": 4000,
    "acumular": 1500, "marcar": 2500, "romper": 2000, "continuar": 3500, "observar": 1500,
    "truncar": 200, "animar": 1500, "esperar": 5000, "confirmar": 2000, "llegar": 6000,
    "tocar": 3000, "rebotar": 500, "frenar": 1000, "desplomar": 400, "hundir": 1000,
    "avisar": 1200, "vigilar": 1000, "mirar": 3000, "buscar": 3500, "aprovechar": 2000,
    "celebrar": 2000, "liderar": 800, "duplicar": 600, "dejar": 6000, "deber": 5000,
    "cerrar": 4000, "perder": 4000, "apostar": 1200, "recomendar": 1500, "pensar": 5000,
    "crecer": 2500, "caer": 4000, "mantener": 4000, "tener": 9000, "poder": 9000,
    "ir": 9000, "hacer": 9000, "decir": 9000, "ver": 8000, "invertir": 2500, "salir": 5000,
    "volver": 5000, "seguir": 6000, "abrir": 3500, "cumplir": 2000, "resistir": 1000,
    "escalar": 600, "retroceder": 600, "cortar": 1500, "arrancar": 1200, "asegurar": 2000,
    "funcionar": 2000, "estudiar": 2000, "analizar": 1500, "revisar": 1500, "informar": 2000,
    "comunicar": 1500, "reunir": 1200, "consultar": 1000, "saber": 6000, "preguntar": 2500,
    "preocupar": 1500, "sufrir": 1500, "castigar": 800, "temer": 1000, "evitar": 2500,
    "proteger": 1200, "multiplicar": 600, "triplicar": 300, "doblar": 800, "explotar": 800, "brillar": 600,
}

# Irregular forms: surface -> (lemma, tense).
IRREGULAR = {
    "continúa": ("continuar", "present"), "continúan": ("continuar", "present"),
    "continuará": ("continuar", "future"),
    "mantengan": ("mantener", "present"), "mantenga": ("mantener", "present"),
    "mantiene": ("mantener", "present"), "mantienen": ("mantener", "present"),
    "mantuvo": ("mantener", "past"), "mantendrá": ("mantener", "future"),
    "mantendría": ("mantener", "conditional"), "manteniendo": ("mantener", "none"),
    "mantenido": ("mantener", "past"),
    "observemos": ("observar", "present"), "observen": ("observar", "present"),
    "va": ("ir", "present"), "van": ("ir", "present"), "vamos": ("ir", "present"),
    "iba": ("ir", "past"), "iban": ("ir", "past"), "irá": ("ir", "future"),
    "irán": ("ir", "future"), "iría": ("ir", "conditional"), "irían": ("ir", "conditional"),
    "yendo": ("ir", "none"), "vaya": ("ir", "present"),
    "puede": ("poder", "present"), "pueden": ("poder", "present"), "podemos": ("poder", "present"),
    "pudo": ("poder", "past"), "pudieron": ("poder", "past"), "podrá": ("poder", "future"),
    "podrán": ("poder", "future"), "podría": ("poder", "conditional"),
    "podrían": ("poder", "conditional"), "podríamos": ("poder", "conditional"),
    "tiene": ("tener", "present"), "tienen": ("tener", "present"), "tenemos": ("tener", "present"),
    "tuvo": ("tener", "past"), "tendrá": ("tener", "future"), "tendrán": ("tener", "future"),
    "tendría": ("tener", "conditional"), "tendrían": ("tener", "conditional"),
    "tenía": ("tener", "past"),
    "hace": ("hacer", "present"), "hacen": ("hacer", "present"), "hizo": ("hacer", "past"),
    "hará": ("hacer", "future"), "haría": ("hacer", "conditional"), "hecho": ("hacer", "past"),
    "dice": ("decir", "present"), "dicen": ("decir", "present"), "dijo": ("decir", "past"),
    "dirá": ("decir", "future"), "diría": ("decir", "conditional"), "dicho": ("decir", "past"),
    "ve": ("ver", "present"), "ven": ("ver", "present"), "vemos": ("ver", "present"),
    "vio": ("ver", "past"), "verá": ("ver", "future"), "veremos": ("ver", "future"),
    "vería": ("ver", "conditional"), "visto": ("ver", "past"),
    "cierra": ("cerrar", "present"), "cierran": ("cerrar", "present"),
    "pierde": ("perder", "present"), "pierden": ("perder", "present"),
    "apuesta": ("apostar", "present"), "apuesto": ("apostar", "present"),
    "recomienda": ("recomendar", "present"), "recomiendo": ("recomendar", "present"),
    "piensa": ("pensar", "present"), "pienso": ("pensar", "present"),
    "crece": ("crecer", "present"), "crecen": ("crecer", "present"),
    "cae": ("caer", "present"), "caen": ("caer", "present"), "cayó": ("caer", "past"),
    "cayeron": ("caer", "past"), "caerá": ("caer", "future"), "caería": ("caer", "conditional"),
    "cayendo": ("caer", "none"), "caído": ("caer", "past"),
    "invierte": ("invertir", "present"), "invierten": ("invertir", "present"),
    "invirtió": ("invertir", "past"), "invertiría": ("invertir", "conditional"),
    "sale": ("salir", "present"), "salen": ("salir", "present"), "salió": ("salir", "past"),
    "saldrá": ("salir", "future"), "saldría": ("salir", "conditional"),
    "vuelve": ("volver", "present"), "vuelven": ("volver", "present"),
    "volverá": ("volver", "future"), "volvería": ("volver", "conditional"), "vuelto": ("volver", "past"),
    "sigue": ("seguir", "present"), "siguen": ("seguir", "present"), "siguió": ("seguir", "past"),
    "seguirá": ("seguir", "future"), "seguiría": ("seguir", "conditional"),
    "siguiendo": ("seguir", "none"),
    "abierto": ("abrir", "past"),
    "sabe": ("saber", "present"), "saben": ("saber", "present"), "sé": ("saber", "present"),
    "supo": ("saber", "past"), "sabrá": ("saber", "future"), "sabría": ("saber", "conditional"),
    "trunca": ("truncar", "present"),
    "animado": ("animar", "past"),
}

# Words that look like verb forms but are kept as their own lemma.
SELF_LEMMAS = {
    "cuidado", "firma", "inicio", "compra", "venta", "cierre", "subida", "bajada", "caída",
    "entrada", "salida", "apuesta", "resultado", "dato", "marca", "alza", "baja", "espera",
    "presentación", "publicación", "acuerdo", "señor", "año", "poco", "humor", "racha", "vía",
    "objetivo", "rebote", "giro", "aviso", "dividendo", "pago", "cuenta", "plan", "máximo",
    "mínimo", "media", "corte", "stop", "orden",
}

NOUN_PLURALS = {
    "señores": "señor", "años": "año", "días": "día", "semanas": "semana", "meses": "mes",
    "acciones": "acción", "valores": "valor", "títulos": "título", "activos": "activo",
    "índices": "índice", "cotizaciones": "cotización", "precios": "precio", "sesiones": "sesión",
    "jornadas": "jornada", "inversores": "inversor", "inversiones": "inversión",
    "analistas": "analista", "carteras": "cartera", "dividendos": "dividendo",
    "beneficios": "beneficio", "ganancias": "ganancia", "pérdidas": "pérdida",
    "resultados": "resultado", "ingresos": "ingreso", "ventas": "venta", "deudas": "deuda",
    "euros": "euro", "dólares": "dólar", "soportes": "soporte", "resistencias": "resistencia",
    "objetivos": "objetivo", "máximos": "máximo", "mínimos": "mínimo", "subidas": "subida",
    "bajadas": "bajada", "caídas": "caída", "desplomes": "desplome", "rebotes": "rebote",
    "repuntes": "repunte", "riesgos": "riesgo", "peligros": "peligro", "alertas": "alerta",
    "oportunidades": "oportunidad", "ocasiones": "ocasión", "compras": "compra",
    "accionistas": "accionista", "informes": "informe", "datos": "dato", "cifras": "cifra",
    "bancos": "banco", "empresas": "empresa", "mercados": "mercado", "bolsas": "bolsa",
    "bajistas": "bajista", "alcistas": "alcista", "noticias": "noticia", "fondos": "fondo",
    "gráficos": "gráfico", "velas": "vela", "niveles": "nivel", "zonas": "zona",
    "previsiones": "previsión", "trimestres": "trimestre", "correcciones": "corrección",
    "entradas": "entrada", "salidas": "salida", "posiciones": "posición", "bonos": "bono",
    "trampas": "trampa", "avisos": "aviso", "amigos": "amigo", "cosas": "cosa",
    "personas": "persona", "problemas": "problema", "horas": "hora", "minutos": "minuto",
    "excelentes": "excelente", "espectaculares": "espectacular", "positivos": "positivo",
    "negativos": "negativo", "sólidos": "sólido", "fuertes": "fuerte", "baratos": "barato",
    "caros": "caro", "contratos": "contrato", "acuerdos": "acuerdo", "planes": "plan",
}

EXTRA_WORDS = """
vamos ganando dividendazo pelotazo cohete luna moon bull bear trading trader
traders broker online web app twitter tuit tuits hilo
análisis buen cambio cambios castigo empleo fecha fechas freno fuerza limpio limpia máxima
peligroso peligrosa reunión rumbo semanal terreno trimestral vista
"""

STOPWORDS = """
a al algo algunas algunos ante antes como con contra cual cuando de del desde donde durante
e el ella ellas ellos en entre era erais eran eras eres es esa esas ese eso esos esta estaba
estabais estaban estabas estad estada estadas estado estados estamos estando estar estaremos
estará estarán estarás estaré estaréis estaría estaríais estaríamos estarían estarías estas
este estemos esto estos estoy estuve estuviera estuvo está estábamos estáis están estás esté
estéis estén estés fue fuera fueron fui fuimos ha habéis había habían haber habrá hay haya he
hemos han has hasta hube hubo la las le les lo los me mi mis mucho muchos mucha muchas nada ni
nos nosotros nosotras o os otra otras otro otros para pero por porque que quien quienes qué se
sea seamos sean seas ser será serán sería serían sido siendo sin sobre sois somos son soy su
sus suya suyas suyo suyos también tanto te tenéis ti tu tus tú un una uno unos unas vosotras
vosotros vuestra vuestras vuestro vuestros y ya yo él éramos mío mía míos mías tuyo tuya tuyos
tuyas nuestro nuestra nuestros nuestras esto eso aquello aquel aquella aquellos aquellas
cada así aquí allí ahí entonces pues luego mientras además aunque sino según tras mediante
semana semanas finde día días hoy ayer mañana
lunes martes miércoles jueves viernes sábado domingo
enero febrero marzo abril mayo junio julio agosto septiembre octubre noviembre diciembre
"""

KEEPWORDS = "no sí muy poco"

SPAM = ["sorteo", "gratis", "quieres ganar dinero", "regalo", "sorteamos", "haz clic",
        "sígueme", "únete gratis", "curso gratuito"]

INDEX_HASHTAGS = ["ibex", "ibex35", "dow", "dowjones", "sp500", "snp500", "nasdaq", "dax", "dax30",
                  "eurostoxx", "eurostoxx50", "cac", "cac40", "ftse", "ftse100", "nikkei",
                  "mercadocontinuo", "bolsa", "bolsaespañola", "bolsas", "trading", "stocks"]

POLARITY = {
    "positive": """subir ganar ganancia beneficio mejorar superar alcista recuperar rebote repunte
        máximo excelente espectacular sólido fuerte positivo verde oportunidad ocasión
        inmejorable potencial crecer dividendo bueno mejor celebrar brillar disparar despegar
        récord euforia barato infravalorado enhorabuena alegría suerte chollo""",
    "negative": """bajar caer caída perder pérdida bajista desplome riesgo peligro alerta trampa
        burbuja crisis recesión pánico miedo malo peor negativo rojo débil hundir desplomar
        empeorar sufrir castigar temer deuda caro sobrecompra corrección volatilidad
        incertidumbre presión cuidado precaución""",
    "neutral": """resultado presentar publicar junta accionista informe calendario dato cifra
        trimestre sesión cotizar precio cierre apertura mercado bolsa acción valor índice
        neutral estable lateral plano informar comunicar agenda""",
}

EMOTION = {
    "happiness": """alegría celebrar euforia enhorabuena felicidades genial suerte ganar
        espectacular excelente brillar humor risa ánimo animar""",
    "sadness": """pánico miedo sufrir perder pérdida desplome hundir crisis temer castigar
        preocupar triste tristeza dolor lamentable""",
}

EMOJI = {
    "rocket": "positive,opportunity",
    "chart_increasing": "positive,opportunity",
    "money_bag": "positive,opportunity",
    "crystal_ball": "opportunity",
    "eyes": "opportunity",
    "fire": "positive,positive_statement",
    "clapping_hands": "positive,positive_statement",
    "flexed_biceps": "positive,positive_statement",
    "thumbs_up": "positive,positive_statement",
    "party_popper": "positive,positive_statement",
    "grinning_face": "positive,positive_statement",
    "slightly_smiling_face": "positive",
    "smiling_face_with_sunglasses": "positive,positive_statement",
    "face_with_tears_of_joy": "positive",
    "chart_decreasing": "negative,negative_awareness",
    "warning": "negative,negative_awareness",
    "face_screaming_in_fear": "negative,negative_awareness",
    "police_car_light": "negative,negative_awareness",
    "skull": "negative,negative_awareness",
    "thumbs_down": "negative,negative_awareness",
    "slightly_frowning_face": "negative",
    "crying_face": "negative",
    "pouting_face": "negative",
    "bear": "negative,negative_awareness",
    "red_circle": "negative",
    "green_circle": "positive",
}


def words(block):
    return [w for w in block.split() if w]


def conjugate(inf, skip_present=False):
    stem, ending = inf[:-2], inf[-2:]
    if ending == "ar":
        forms = {
            stem + "a": "present", stem + "an": "present", stem + "amos": "present",
            stem + "ó": "past", stem + "aron": "past", stem + "ado": "past",
            stem + "aba": "past", stem + "aban": "past",
        }
        gerund = stem + "ando"
    elif ending in ("er", "ir"):
        forms = {
            stem + "e": "present", stem + "en": "present",
            stem + ("emos" if ending == "er" else "imos"): "present",
            stem + "ió": "past", stem + "ieron": "past", stem + "ido": "past",
            stem + "ía": "past", stem + "ían": "past",
        }
        gerund = stem + "iendo"
    else:
        raise ValueError(inf)
    forms[inf + "á"] = "future"
    forms[inf + "án"] = "future"
    forms[inf + "emos"] = "future"
    forms[inf + "ía"] = "conditional"
    forms[inf + "ían"] = "conditional"
    forms[gerund] = "none"
    if skip_present:
        forms = {k: v for k, v in forms.items() if v != "present"}
    return forms


IRREGULAR_STEMS = {"tener", "poder", "ir", "hacer", "decir", "ver", "caer", "salir", "saber",
                   "mantener", "seguir", "volver", "abrir", "cerrar", "perder", "apostar",
                   "recomendar", "pensar", "invertir", "crecer", "continuar"}


def main():
    lex = {}
    lemmas = {}

    def add(word, freq):
        word = word.lower()
        lex[word] = max(lex.get(word, 0), freq)

    def lemma(surface, lem, pos, tense):
        surface = surface.lower()
        if surface not in lemmas:
            lemmas[surface] = (lem, pos, tense)

    fw = words(FUNCTION_WORDS)
    for rank, w in enumerate(fw, start=1):
        add(w, int(3_000_000 / rank ** 0.9))
    for rank, w in enumerate(words(GENERAL), start=1):
        add(w, int(120_000 / rank ** 0.6))
    for rank, w in enumerate(words(FINANCE), start=1):
        add(w, int(60_000 / rank ** 0.6))
    for w in words(EXTRA_WORDS) + words(EXTRA_ADVERB_FORMS) + words(ADVERBS):
        add(w, 900)
    for w in words(STOPWORDS):
        add(w, 5000)
    for w in words(KEEPWORDS):
        add(w, 50000)
    for phrase in SPAM:
        for w in phrase.split():
            add(w, 800)
    for group in list(POLARITY.values()) + list(EMOTION.values()):
        for w in words(group):
            add(w, 1500)

    for w in SELF_LEMMAS:
        lemma(w, w, "N", "none")
        add(w, 2000)
    for surface, (lem, tense) in IRREGULAR.items():
        lemma(surface, lem, "V", tense)
        add(surface, 1500)
    for plural, singular in NOUN_PLURALS.items():
        lemma(plural, singular, "N", "none")
        add(plural, 1500)
        add(singular, 2500)
    for inf, base in REGULAR_VERBS.items():
        lemma(inf, inf, "V", "none")
        add(inf, base)
        partial = inf in ("cerrar", "perder", "apostar", "recomendar", "pensar", "continuar",
                          "invertir")
        if inf in IRREGULAR_STEMS and not partial and inf != "crecer":
            continue
        for i, (surface, tense) in enumerate(conjugate(inf, skip_present=partial).items()):
            lemma(surface, inf, "V", tense)
            add(surface, max(10, base // (4 + i)))

    stop = set(words(STOPWORDS)) - set(words(KEEPWORDS))
    errors = []
    for surface, (lem, pos, tense) in lemmas.items():
        if surface in stop:
            continue
        if lem not in lex:
            errors.append(f"lemma {lem} of {surface} missing from lexicon")
        if lem in stop:
            errors.append(f"lemma {lem} of {surface} is a stop word")
        if lem in lemmas and lemmas[lem][0] != lem:
            errors.append(f"lemma {lem} of {surface} is itself mapped to {lemmas[lem][0]}")
    if errors:
        print("\n".join(errors), file=sys.stderr)
        sys.exit(1)

    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "es_frequency.tsv", "w", encoding="utf-8") as f:
        f.write("# word\tfrequency\n")
        for w, n in sorted(lex.items(), key=lambda kv: (-kv[1], kv[0])):
            f.write(f"{w}\t{n}\n")
    with open(OUT / "lemmas.tsv", "w", encoding="utf-8") as f:
        f.write("# surface\tlemma\tpos\ttense\n")
        for s in sorted(lemmas):
            if s in stop:
                continue
            lem, pos, tense = lemmas[s]
            f.write(f"{s}\t{lem}\t{pos}\t{tense}\n")
    (OUT / "stopwords.txt").write_text("\n".join(sorted(stop)) + "\n", encoding="utf-8")
    (OUT / "keepwords.txt").write_text("\n".join(words(KEEPWORDS)) + "\n", encoding="utf-8")
    (OUT / "spam.txt").write_text("\n".join(SPAM) + "\n", encoding="utf-8")
    (OUT / "index_hashtags.txt").write_text("\n".join(INDEX_HASHTAGS) + "\n", encoding="utf-8")
    (OUT / "adverbs.txt").write_text("\n".join(sorted(set(words(ADVERBS)))) + "\n", encoding="utf-8")
    with open(OUT / "polarity.tsv", "w", encoding="utf-8") as f:
        for cat, block in POLARITY.items():
            for w in sorted(set(words(block))):
                f.write(f"{w}\t{cat}\n")
    with open(OUT / "emotion.tsv", "w", encoding="utf-8") as f:
        for cat, block in EMOTION.items():
            for w in sorted(set(words(block))):
                f.write(f"{w}\t{cat}\n")
    with open(OUT / "emoji.tsv", "w", encoding="utf-8") as f:
        for name in sorted(EMOJI):
            f.write(f"{name}\t{EMOJI[name]}\n")
    print(f"lexicon {len(lex)} words, {len(lemmas)} lemma entries")


if __name__ == "__main__":
    main()

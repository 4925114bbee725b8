"""Regenerates the miniature corpus fixture. Output is deterministic."""

import random

GROUPS = [
    ("Mercury", [("Mercury (planet)", "Planet", "orbit sun smallest crater"),
                 ("Freddie Mercury", "Musician", "singer queen band vocals"),
                 ("Mercury (element)", "ChemicalElement", "liquid metal toxic thermometer")]),
    ("Jordan", [("Jordan (country)", "Country", "amman desert kingdom border"),
                ("Michael Jordan", "BasketballPlayer", "bulls dunk championship guard")]),
    ("Amazon", [("Amazon (company)", "Company", "retailer online warehouse shipping"),
                ("Amazon River", "River", "rainforest basin tributary brazil")]),
    ("Python", [("Python (language)", "ProgrammingLanguage", "interpreter syntax code library"),
                ("Python (snake)", "Reptile", "constrictor scales jungle prey"),
                ("Monty Python", "ComedyGroup", "sketch comedy flying circus")]),
    ("Orion", [("Orion (constellation)", "Constellation", "stars belt winter sky"),
               ("Orion (spacecraft)", "Spacecraft", "capsule launch crew lunar")]),
    ("Georgia", [("Georgia (country)", "Country", "tbilisi caucasus mountains wine"),
                 ("Georgia (state)", "State", "atlanta peach southern county")]),
    ("Phoenix", [("Phoenix (city)", "City", "arizona heat valley suburbs"),
                 ("Phoenix (mythology)", "MythicalCreature", "rebirth ashes fire legend"),
                 ("Phoenix (band)", "Band", "french indie album tour")]),
    ("Saturn", [("Saturn (planet)", "Planet", "rings gas giant moons"),
                ("Saturn (rocket)", "Rocket", "apollo booster stage thrust")]),
    ("Java", [("Java (island)", "Island", "jakarta volcano indonesia rice"),
              ("Java (language)", "ProgrammingLanguage", "bytecode classes virtual machine")]),
    ("Columbia", [("Columbia University", "University", "campus manhattan students faculty"),
                  ("Columbia River", "River", "dam salmon oregon estuary")]),
    ("Victoria", [("Queen Victoria", "Monarch", "reign empire throne widow"),
                  ("Victoria (Australia)", "State", "melbourne coast bushfire region"),
                  ("Lake Victoria", "Lake", "uganda fishing shore nile")]),
    ("Delta", [("Delta Air Lines", "Airline", "flights hub passengers atlanta"),
               ("River delta", "Landform", "sediment mouth wetland silt")]),
]

SUBCLASS = [
    ("Planet", "CelestialBody"), ("Constellation", "CelestialBody"), ("CelestialBody", "Natural Place"),
    ("Musician", "Artist"), ("Artist", "Person"), ("BasketballPlayer", "Athlete"), ("Athlete", "Person"),
    ("Monarch", "Person"), ("ChemicalElement", "Chemical Substance"),
    ("Country", "Location"), ("State", "Location"), ("City", "Location"), ("Island", "Natural Place"),
    ("River", "BodyOfWater"), ("Lake", "BodyOfWater"), ("BodyOfWater", "Natural Place"),
    ("Landform", "Natural Place"),
    ("Company", "Organisation"), ("Airline", "Company"), ("University", "Organisation"),
    ("Band", "Organisation"), ("ComedyGroup", "Organisation"),
    ("ProgrammingLanguage", "Work"), ("Reptile", "Species"), ("Spacecraft", "Device"), ("Rocket", "Device"),
    ("MythicalCreature", "Other"),
]

FILLER = ("the of and in a to was is for on with as by at from that which it "
          "also during after before many some known early later").split()

LINKS_PER_ENTITY = 6
TITLE_LINKS = 2
PLAIN_PER_ALIAS = 3
DOCS = 60


def sentence(rng, words):
    body = [rng.choice(FILLER) for _ in range(rng.randint(4, 7))] + words
    rng.shuffle(body)
    return body


def main():
    rng = random.Random(20240607)
    mentions = []
    for alias, ents in GROUPS:
        for title, _, kw in ents:
            kws = kw.split()
            for _ in range(LINKS_PER_ENTITY):
                mentions.append((f"[[{title}|{alias}]]", rng.sample(kws, 2)))
            for _ in range(TITLE_LINKS):
                mentions.append((f"[[{title}]]", rng.sample(kws, 2)))
        for _ in range(PLAIN_PER_ALIAS):
            title, _, kw = rng.choice(ents)
            mentions.append((alias, rng.sample(kw.split(), 2)))
    # one unambiguous alias: 9 vs 1 links
    for _ in range(9):
        mentions.append(("[[Apple Inc.|Apple]]", ["iphone", "cupertino"]))
    mentions.append(("[[Apple (fruit)|Apple]]", ["orchard", "pie"]))
    # noise
    mentions.append(("[[Michael Jordan|Jordan]]-based", ["sneaker"]))
    mentions.append(("Jordan-based", ["startup"]))
    mentions.append(("File:Mercury.png", []))
    mentions.append(("[[File:Saturn.jpg|Saturn]]", ["thumbnail"]))
    mentions.append(("[[broken link", []))
    rng.shuffle(mentions)

    docs = [[] for _ in range(DOCS)]
    for i, m in enumerate(mentions):
        docs[i % DOCS].append(m)
    lines = []
    for d, ms in enumerate(docs):
        words = []
        for surface, ctx in ms:
            s = sentence(rng, ctx)
            cut = rng.randint(0, len(s))
            words += s[:cut] + [surface] + s[cut:] + ["."]
        if d == 17:
            words += ["*", "footnote"]
        lines.append(f"doc{d:03d}\t" + " ".join(words))
    lines.append("empty001\t")
    lines.append("malformed line without a tab")
    with open("corpus.txt", "w") as f:
        f.write("\n".join(lines) + "\n")

    with open("entities.tsv", "w") as f:
        for alias, ents in GROUPS:
            for title, ty, kw in ents:
                f.write(f"{title}\t{title}\t{title} is a {ty.lower()} ({kw}).\thttps://en.wikipedia.org/wiki/{title.replace(' ', '_')}\n")
    with open("instance_of.tsv", "w") as f:
        for alias, ents in GROUPS:
            for title, ty, _ in ents:
                f.write(f"{title}\t{ty}\n")
    with open("subclass_of.tsv", "w") as f:
        for child, parent in SUBCLASS:
            f.write(f"{child}\t{parent}\n")


if __name__ == "__main__":
    main()

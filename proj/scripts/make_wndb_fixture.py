#!/usr/bin/env python3
"""Writes the small hand-built WNDB lexicons used by tests and stub-mode runs.

Offsets are real byte offsets into the emitted data files, hyponym pointers are
derived from the hypernym declarations so every edge has its inverse.

    python3 scripts/make_wndb_fixture.py
"""

import os
import sys

HEADER = [
    "  1 Hand-built WNDB fixture for covergen tests.",
    "  2 Format follows WordNet 3.x data/index files; content is illustrative.",
]

POS_FILE = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
LEX_FILENUM = {"n": 3, "v": 40, "a": 0, "r": 2}

# key, ss_type, lemmas, hypernym keys, gloss
COVERS = [
    ("entity", "n", ["entity"], [], "that which is perceived or known to exist"),
    ("abstraction", "n", ["abstraction"], ["entity"], "a general concept"),
    ("animal", "n", ["animal", "beast", "creature", "fauna"], ["entity"],
     "a living organism characterized by voluntary movement"),
    ("herbivore", "n", ["herbivore"], ["animal"], "any animal that feeds chiefly on grass and other plants"),
    ("canine", "n", ["canine", "canid"], ["animal"], "any of various fissiped mammals with nonretractile claws"),
    ("dog", "n", ["dog", "domestic_dog", "canis_familiaris"], ["canine"],
     "a member of the genus Canis that has been domesticated by man"),
    ("wolf", "n", ["wolf"], ["canine"], "any of various predatory carnivorous canine mammals"),
    ("fox", "n", ["fox"], ["canine"], "alert carnivorous mammal with pointed muzzle and ears"),
    ("monster", "n", ["monster", "mythical_monster"], ["entity"], "an imaginary creature usually having various human and animal parts"),
    ("dragon", "n", ["dragon", "firedrake"], ["monster"], "a creature of Teutonic mythology"),
    ("giant", "n", ["giant", "titan"], ["monster"], "an imaginary figure of superhuman size"),
    ("body_of_water", "n", ["body_of_water", "water"], ["entity"], "the part of the earth's surface covered with water"),
    ("sea", "n", ["sea"], ["body_of_water"], "a division of an ocean or a large body of salt water"),
    ("ocean", "n", ["ocean"], ["body_of_water"], "a large body of water constituting a principal part of the hydrosphere"),
    ("gulf", "n", ["gulf"], ["body_of_water"], "an arm of a sea or ocean partly enclosed by land"),
    ("bay", "n", ["bay", "embayment"], ["body_of_water"], "an indentation of a shoreline larger than a cove"),
    ("stream", "n", ["stream", "watercourse"], ["body_of_water"], "a natural body of running water flowing on or under the earth"),
    ("ford", "n", ["ford", "crossing"], ["body_of_water"], "a shallow area in a stream that can be forded"),
    ("vegetation", "n", ["vegetation", "flora", "botany"], ["entity"], "all the plant life in a particular region"),
    ("forest", "n", ["forest", "wood", "woods"], ["vegetation"], "the trees and other plants in a large densely wooded area"),
    ("jungle", "n", ["jungle"], ["vegetation"], "a tropical forest where plant life is dense"),
    ("land", "n", ["land", "ground", "soil"], ["entity"], "material in the top layer of the surface of the earth"),
    ("timberland", "n", ["forest", "timberland", "timber"], ["land"], "land that is covered with trees and shrubs"),
    ("field", "n", ["field"], ["land"], "a piece of land cleared of trees and usually enclosed"),
    ("garden", "n", ["garden"], ["land"], "a plot of ground where plants are cultivated"),
    ("undertaking", "n", ["undertaking", "project", "task"], ["abstraction"], "any piece of work that is undertaken or attempted"),
    ("adventure", "n", ["adventure", "escapade", "risky_venture"], ["undertaking"], "a wild and exciting undertaking"),
    ("enterprise", "n", ["enterprise"], ["undertaking"], "a purposeful or industrious undertaking"),
    ("combustion", "n", ["combustion", "burning"], ["entity"], "a process in which a substance reacts with oxygen to give heat and light"),
    ("fire", "n", ["fire", "flame", "flaming"], ["combustion"], "the process of combustion of inflammable materials"),
    ("blaze", "n", ["blaze", "blazing"], ["fire"], "a strong flame that burns brightly"),
    ("time_period", "n", ["time_period", "period"], ["abstraction"], "an amount of time"),
    ("night", "n", ["night", "nighttime", "dark"], ["time_period"], "the time after sunset and before sunrise while it is dark outside"),
    ("day", "n", ["day", "daytime"], ["time_period"], "the time after sunrise and before sunset while it is light outside"),
    ("evening", "n", ["evening", "eve"], ["time_period"], "the latter part of the day"),
    ("condition", "n", ["condition", "status"], ["abstraction"], "a state at a particular time"),
    ("darkness", "n", ["dark", "darkness", "shadow"], ["condition"], "absence of light or illumination"),
    ("building", "n", ["building", "edifice"], ["entity"], "a structure that has a roof and walls"),
    ("house", "n", ["house"], ["building"], "a dwelling that serves as living quarters for one or more families"),
    ("castle", "n", ["castle", "palace"], ["building"], "a large and stately mansion"),
    ("tower", "n", ["tower"], ["building"], "a structure taller than its diameter"),
    ("bet", "v", ["bet", "wager", "play"], [], "stake on the outcome of an issue"),
    ("gamble", "v", ["gamble", "chance", "risk", "hazard", "adventure", "take_chances"], ["bet"],
     "take a risk in the hope of a favorable outcome"),
    ("venture", "v", ["venture", "hazard", "adventure", "stake", "jeopardize"], [], "put at risk"),
    ("doomed", "a", ["doomed", "lost"], [], "marked for certain death"),
    ("bewildered", "s", ["baffled", "befuddled", "bewildered", "confused", "lost", "at_sea"], [],
     "having lost your bearings"),
    ("helpless", "s", ["helpless", "lost"], [], "unable to function"),
    ("missing", "a", ["missing", "lost"], [], "not able to be found"),
    ("dark_adj", "a", ["dark"], [], "devoid of or deficient in light or brightness"),
    ("sinister", "s", ["dark", "black", "sinister"], [], "stemming from evil characteristics"),
]

# Seven noun synsets for parser counting tests.
MINI = [
    ("entity", "n", ["entity"], [], "that which is perceived or known to exist"),
    ("animal", "n", ["animal", "beast"], ["entity"], "a living organism characterized by voluntary movement"),
    ("herbivore", "n", ["herbivore"], ["animal"], "any animal that feeds chiefly on grass and other plants"),
    ("canine", "n", ["canine", "canid"], ["animal"], "any of various fissiped mammals with nonretractile claws"),
    ("dog", "n", ["dog", "domestic_dog"], ["canine"], "a member of the genus Canis that has been domesticated by man"),
    ("wolf", "n", ["wolf"], ["canine"], "any of various predatory carnivorous canine mammals"),
    ("sea", "n", ["sea"], ["entity"], "a division of an ocean or a large body of salt water"),
]


def file_pos(ss_type):
    return "a" if ss_type == "s" else ss_type


def build(synsets, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    by_key = {s[0]: s for s in synsets}
    hyponyms = {s[0]: [] for s in synsets}
    for key, _, _, hypers, _ in synsets:
        for h in hypers:
            hyponyms[h].append(key)

    def pointers(key):
        ptrs = [("@", h) for h in by_key[key][3]]
        ptrs += [("~", h) for h in hyponyms[key]]
        return ptrs

    def render(key, offsets):
        _, ss_type, lemmas, _, gloss = by_key[key]
        ptrs = pointers(key)
        parts = ["%08d" % offsets[key], "%02d" % LEX_FILENUM[file_pos(ss_type)], ss_type, "%02x" % len(lemmas)]
        for lemma in lemmas:
            parts += [lemma, "0"]
        parts.append("%03d" % len(ptrs))
        for sym, target in ptrs:
            parts += [sym, "%08d" % offsets[target], file_pos(by_key[target][1]), "0000"]
        if ss_type == "v":
            parts += ["01", "+", "02", "00"]
        return " ".join(parts) + " | " + gloss + "  \n"

    groups = {}
    for s in synsets:
        groups.setdefault(file_pos(s[1]), []).append(s[0])

    # Offsets depend on line lengths, which depend on offsets only through the
    # fixed-width %08d fields, so a single layout pass is exact.
    offsets = {s[0]: 0 for s in synsets}
    for pos, keys in groups.items():
        cursor = sum(len(h) + 1 for h in HEADER)
        for key in keys:
            offsets[key] = cursor
            cursor += len(render(key, offsets).encode())

    for pos, keys in groups.items():
        with open(os.path.join(out_dir, "data." + POS_FILE[pos]), "w") as f:
            for h in HEADER:
                f.write(h + "\n")
            for key in keys:
                f.write(render(key, offsets))

        index = {}
        for key in keys:
            for lemma in by_key[key][2]:
                index.setdefault(lemma, []).append(key)
        with open(os.path.join(out_dir, "index." + POS_FILE[pos]), "w") as f:
            for h in HEADER:
                f.write(h + "\n")
            for lemma in sorted(index):
                keys_for = index[lemma]
                symbols = sorted({sym for k in keys_for for sym, _ in pointers(k)})
                fields = [lemma, pos, str(len(keys_for)), str(len(symbols))] + symbols
                fields += [str(len(keys_for)), "0"] + ["%08d" % offsets[k] for k in keys_for]
                f.write(" ".join(fields) + "  \n")


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    build(COVERS, os.path.join(root, "data", "wordnet-fixture"))
    build(MINI, os.path.join(root, "tests", "data", "wndb-mini"))
    return 0


if __name__ == "__main__":
    sys.exit(main())

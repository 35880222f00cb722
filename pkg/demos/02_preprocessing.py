"""The four-stage text preprocessing pipeline, stage by stage.

clean (letters only, lowercase) -> tokenize (whitespace split) -> stopword
removal -> lemmatization. The lemmatizer is deliberately self-contained: an
exceptions table for irregular forms plus ordered suffix rules that only
fire when the stripped result is a known word, so behaviour is fully
deterministic and auditable.
"""
import topicforge
from topicforge.ingest import categorize_records, parse_records
from topicforge.textprep import (
    LemmaLexicon,
    StopwordList,
    clean_text,
    lemmatize,
    preprocess_corpus,
    remove_stopwords,
    tokenize,
)

raw = "The pilot was flying at 3,000 ft when BOTH engines failed!"
print("raw      :", raw)

cleaned = clean_text(raw)
print("cleaned  :", cleaned)

tokens = tokenize(cleaned)
print("tokens   :", tokens)

stoplist = StopwordList.builtin()
content = remove_stopwords(tokens, stoplist)
print("content  :", content)

lexicon = LemmaLexicon.builtin()
lemmas = lemmatize(content, lexicon)
print("lemmas   :", lemmas)

# irregular forms come from the exceptions table, regular ones from suffix
# rules gated by the dictionary ("crashed" -> "crash" only because "crash"
# is a known word)
for token in ("flying", "flew", "crashed", "emergencies", "taking", "zzyzx"):
    print(f"  lemma({token!r}) = {lexicon.lemma(token)!r}")

records = categorize_records(parse_records(topicforge.data_path()))
docs = preprocess_corpus(records, stoplist, lexicon, min_tokens=3)
print(f"\ncorpus: {len(records)} records -> {len(docs)} docs (short/empty ones dropped)")
print("doc 0:", docs[0].tokens[:12], "...")

//! Construction of attributed public-private graphs from publication records.
//!
//! Records are first collected into a [`Corpus`], which interns author names
//! and keywords and puts papers into a canonical order (date, then author
//! names, then keywords). Vertex ids follow first appearance in that order, so
//! the same record multiset always yields the same graph whatever order the
//! records arrived in.
//!
//! For a cutoff `Y` the build runs two passes. The public pass connects every
//! author pair of every paper dated before `Y`. The private pass then visits
//! papers dated on or after `Y`; every author pair not already joined publicly
//! becomes a private edge, inserted into the private graph of each author of
//! that paper.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use chrono::NaiveDate;

use crate::error::Result;
use crate::ingest::{CutoffTimestamp, PaperRecord};
use crate::model::{
    AttributeStore, Edge, KeywordSet, PPGraph, PrivateGraph, PublicGraph, VertexId, MAX_KEYWORDS,
};
use crate::par::Parallelism;

/// Keyword id; ids are assigned in lexicographic order of the keyword text.
pub type TokenId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Paper {
    date: NaiveDate,
    authors: Range<usize>,
    tokens: Range<usize>,
}

/// Interned, canonically ordered record collection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    names: Vec<String>,
    vocabulary: Vec<String>,
    papers: Vec<Paper>,
    author_arena: Vec<VertexId>,
    token_arena: Vec<TokenId>,
}

/// Accumulates records before sealing them into a [`Corpus`].
#[derive(Default)]
pub struct CorpusBuilder {
    name_ids: HashMap<String, u32>,
    names: Vec<String>,
    token_ids: HashMap<String, u32>,
    tokens: Vec<String>,
    papers: Vec<(NaiveDate, Vec<u32>, Vec<u32>)>,
}

impl CorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: PaperRecord) {
        let authors = record
            .authors
            .into_iter()
            .map(|a| intern(&mut self.name_ids, &mut self.names, a))
            .collect();
        let tokens = record
            .title_tokens
            .into_iter()
            .map(|t| intern(&mut self.token_ids, &mut self.tokens, t))
            .collect();
        self.papers.push((record.date, authors, tokens));
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn finish(self) -> Corpus {
        let name_rank = lexicographic_ranks(&self.names);
        let token_rank = lexicographic_ranks(&self.tokens);

        let mut papers: Vec<(NaiveDate, Vec<u32>, Vec<u32>)> = self
            .papers
            .into_iter()
            .map(|(d, a, t)| {
                (
                    d,
                    a.into_iter().map(|x| name_rank[x as usize]).collect(),
                    t.into_iter().map(|x| token_rank[x as usize]).collect(),
                )
            })
            .collect();
        // Ranks compare like the underlying strings.
        papers.sort_unstable();

        let mut sorted_names = self.names;
        sorted_names.sort_unstable();
        let mut vocabulary = self.tokens;
        vocabulary.sort_unstable();

        let mut vertex_of_rank = vec![u32::MAX; sorted_names.len()];
        let mut names = Vec::with_capacity(sorted_names.len());
        let mut author_arena = Vec::new();
        let mut token_arena = Vec::new();
        let mut out = Vec::with_capacity(papers.len());
        for (date, authors, tokens) in papers {
            let a0 = author_arena.len();
            for rank in authors {
                let slot = &mut vertex_of_rank[rank as usize];
                if *slot == u32::MAX {
                    *slot = names.len() as u32;
                    names.push(std::mem::take(&mut sorted_names[rank as usize]));
                }
                author_arena.push(VertexId(*slot));
            }
            let t0 = token_arena.len();
            token_arena.extend(tokens);
            out.push(Paper {
                date,
                authors: a0..author_arena.len(),
                tokens: t0..token_arena.len(),
            });
        }
        Corpus {
            names,
            vocabulary,
            papers: out,
            author_arena,
            token_arena,
        }
    }
}

fn intern(ids: &mut HashMap<String, u32>, list: &mut Vec<String>, s: String) -> u32 {
    if let Some(&id) = ids.get(&s) {
        return id;
    }
    let id = list.len() as u32;
    list.push(s.clone());
    ids.insert(s, id);
    id
}

fn lexicographic_ranks(items: &[String]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..items.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| items[a as usize].cmp(&items[b as usize]));
    let mut rank = vec![0u32; items.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i as usize] = r as u32;
    }
    rank
}

impl Corpus {
    pub fn from_records<I: IntoIterator<Item = PaperRecord>>(records: I) -> Self {
        let mut b = CorpusBuilder::new();
        for r in records {
            b.push(r);
        }
        b.finish()
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn keyword(&self, t: TokenId) -> &str {
        &self.vocabulary[t as usize]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(VertexId::from_index)
    }

    /// Papers in canonical order as `(date, authors, keyword ids)`.
    pub fn papers(&self) -> impl Iterator<Item = (NaiveDate, &[VertexId], &[TokenId])> + '_ {
        self.papers.iter().map(|p| {
            (
                p.date,
                &self.author_arena[p.authors.clone()],
                &self.token_arena[p.tokens.clone()],
            )
        })
    }

    fn split(&self, cutoff: CutoffTimestamp) -> (Vec<usize>, Vec<usize>) {
        (0..self.papers.len()).partition(|&i| cutoff.is_public(self.papers[i].date))
    }

    fn authors(&self, i: usize) -> &[VertexId] {
        &self.author_arena[self.papers[i].authors.clone()]
    }

    fn tokens(&self, i: usize) -> &[TokenId] {
        &self.token_arena[self.papers[i].tokens.clone()]
    }
}

fn author_pairs(authors: &[VertexId]) -> impl Iterator<Item = Edge> + '_ {
    authors.iter().enumerate().flat_map(move |(i, &a)| {
        authors[i + 1..].iter().map(move |&b| crate::model::ordered_edge(a, b))
    })
}

/// Structure of a public-private graph before attributes are attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub public: PublicGraph,
    /// Nonempty private graphs, ascending by owner.
    pub private: Vec<PrivateGraph>,
}

/// Two-pass partition of collaborations at `cutoff`.
pub fn build_structure(corpus: &Corpus, cutoff: CutoffTimestamp, par: Parallelism) -> Structure {
    let (before, after) = corpus.split(cutoff);
    let n = corpus.vertex_count();

    let mut public_edges: Vec<Edge> = before
        .iter()
        .flat_map(|&i| author_pairs(corpus.authors(i)))
        .collect();
    par.sort_unstable(&mut public_edges);
    public_edges.dedup();
    let public = PublicGraph::from_sorted_unique(n, &public_edges);
    drop(public_edges);

    let per_paper: Vec<Vec<(VertexId, Edge)>> = par.map(&after, |&i| {
        let authors = corpus.authors(i);
        let hidden: Vec<Edge> = author_pairs(authors)
            .filter(|&(a, b)| !public.has_edge(a, b))
            .collect();
        let mut out = Vec::with_capacity(hidden.len() * authors.len());
        for &owner in authors {
            out.extend(hidden.iter().map(|&e| (owner, e)));
        }
        out
    });
    let mut owned: Vec<(VertexId, Edge)> = per_paper.into_iter().flatten().collect();
    par.sort_unstable(&mut owned);
    owned.dedup();

    let mut private = Vec::new();
    let mut start = 0;
    while start < owned.len() {
        let owner = owned[start].0;
        let end = start + owned[start..].partition_point(|&(o, _)| o == owner);
        let edges = owned[start..end].iter().map(|&(_, e)| e).collect();
        private.push(PrivateGraph::from_sorted_unique(owner, edges));
        start = end;
    }
    Structure { public, private }
}

/// Top keywords from sorted `(key, token)` rows: per key, up to five tokens by
/// descending frequency, ties broken by ascending keyword text.
fn top_keywords<K: Copy + Eq>(rows: &[(K, TokenId)], corpus: &Corpus) -> Vec<(K, KeywordSet)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let key = rows[i].0;
        let mut counts: Vec<(usize, TokenId)> = Vec::new();
        while i < rows.len() && rows[i].0 == key {
            let tok = rows[i].1;
            let mut c = 0;
            while i < rows.len() && rows[i].0 == key && rows[i].1 == tok {
                c += 1;
                i += 1;
            }
            counts.push((c, tok));
        }
        counts.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let set = KeywordSet::new(
            counts
                .iter()
                .take(MAX_KEYWORDS)
                .map(|&(_, t)| corpus.keyword(t).to_owned()),
        )
        .expect("capped at MAX_KEYWORDS");
        out.push((key, set));
    }
    out
}

/// `A(v)`: top keywords over titles of `v`'s papers dated before the cutoff.
pub fn extract_public_attributes(
    corpus: &Corpus,
    cutoff: CutoffTimestamp,
    par: Parallelism,
) -> BTreeMap<VertexId, KeywordSet> {
    let (before, _) = corpus.split(cutoff);
    let mut rows: Vec<(VertexId, TokenId)> = Vec::new();
    for i in before {
        for &a in corpus.authors(i) {
            rows.extend(corpus.tokens(i).iter().map(|&t| (a, t)));
        }
    }
    par.sort_unstable(&mut rows);
    top_keywords(&rows, corpus)
        .into_iter()
        .filter(|(_, s)| !s.is_empty())
        .collect()
}

/// `A_u(v)` for each owner `u` and `v ∈ V_u`: top keywords over titles of the
/// papers dated on or after the cutoff whose authors include both `u` and
/// `v`. For `v = u` that is every such paper of `u`.
pub fn extract_private_attributes(
    corpus: &Corpus,
    cutoff: CutoffTimestamp,
    private: &[PrivateGraph],
    par: Parallelism,
) -> BTreeMap<(VertexId, VertexId), KeywordSet> {
    let by_owner: HashMap<VertexId, &PrivateGraph> =
        private.iter().map(|pg| (pg.owner(), pg)).collect();
    let (_, after) = corpus.split(cutoff);
    let per_paper: Vec<Vec<((VertexId, VertexId), TokenId)>> = par.map(&after, |&i| {
        let authors = corpus.authors(i);
        let tokens = corpus.tokens(i);
        let mut out = Vec::new();
        for &u in authors {
            let Some(pg) = by_owner.get(&u) else { continue };
            for &v in authors {
                if pg.contains_vertex(v) {
                    out.extend(tokens.iter().map(|&t| ((u, v), t)));
                }
            }
        }
        out
    });
    let mut rows: Vec<((VertexId, VertexId), TokenId)> = per_paper.into_iter().flatten().collect();
    par.sort_unstable(&mut rows);
    top_keywords(&rows, corpus)
        .into_iter()
        .filter(|(_, s)| !s.is_empty())
        .collect()
}

/// Full attributed build at one cutoff.
pub fn build(corpus: &Corpus, cutoff: CutoffTimestamp, par: Parallelism) -> Result<PPGraph> {
    let Structure { public, private } = build_structure(corpus, cutoff, par);
    let mut attrs = AttributeStore::new();
    for (v, set) in extract_public_attributes(corpus, cutoff, par) {
        attrs.set_public(v, set);
    }
    for ((u, v), set) in extract_private_attributes(corpus, cutoff, &private, par) {
        attrs.set_private(u, v, set);
    }
    PPGraph::new(corpus.names.clone(), public, private, attrs)
}

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::pretok::{pretokenize, PretokConfig, SPACE_MARKER};
use crate::error::{Error, Result};

pub type TokenId = u32;

/// Default vocabulary size.
pub const DEFAULT_VOCAB_SIZE: usize = 128_000;

pub const BYTE_TOKENS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    /// Raw byte, displayed as `<0xNN>`.
    Byte(u8),
    /// Reserved string that encoding never produces.
    Special(String),
    /// Text token; spaces appear as the marker scalar.
    Text(String),
}

impl Token {
    pub fn display(&self) -> String {
        match self {
            Token::Byte(b) => alloc::format!("<0x{b:02X}>"),
            Token::Special(s) | Token::Text(s) => s.clone(),
        }
    }
}

/// A trained byte-fallback BPE tokenizer.
///
/// Ids are contiguous: the 256 byte tokens first, then specials, then the
/// seed alphabet in code-point order, then one id per distinct merge output
/// in training order.
#[derive(Debug, Clone)]
pub struct TokenizerModel {
    vocab: Vec<Token>,
    merges: Vec<(TokenId, TokenId)>,
    alphabet: BTreeSet<char>,
    specials: Vec<String>,
    pretok: PretokConfig,
    vocab_limit: usize,
    char_ids: HashMap<char, TokenId>,
    text_ids: HashMap<String, TokenId>,
    merge_ranks: HashMap<(TokenId, TokenId), (u32, TokenId)>,
}

impl PartialEq for TokenizerModel {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab
            && self.merges == other.merges
            && self.alphabet == other.alphabet
            && self.specials == other.specials
            && self.pretok == other.pretok
            && self.vocab_limit == other.vocab_limit
    }
}

/// Smallest vocabulary that can hold `alphabet` (plus the space marker),
/// the byte tokens and `specials`.
pub fn vocab_floor(alphabet: &BTreeSet<char>, specials: usize) -> usize {
    let marker = usize::from(!alphabet.contains(&SPACE_MARKER));
    alphabet.len() + marker + BYTE_TOKENS + specials
}

impl TokenizerModel {
    /// A model with no merges. `alphabet` always gains the space marker.
    pub fn base(
        alphabet: &BTreeSet<char>,
        specials: &[String],
        pretok: PretokConfig,
        vocab_limit: usize,
    ) -> Result<Self> {
        let floor = vocab_floor(alphabet, specials.len());
        if vocab_limit < floor {
            return Err(Error::VocabTooSmall {
                requested: vocab_limit,
                floor,
            });
        }
        let mut alphabet = alphabet.clone();
        alphabet.insert(SPACE_MARKER);
        Ok(Self::assemble(alphabet, specials, pretok, vocab_limit))
    }

    /// Only the 256 byte tokens: every scalar, including spaces, encodes to its
    /// UTF-8 bytes. Serves as the no-vocabulary baseline for fertility.
    pub fn byte_only(pretok: PretokConfig) -> Self {
        Self::assemble(BTreeSet::new(), &[], pretok, BYTE_TOKENS)
    }

    fn assemble(
        alphabet: BTreeSet<char>,
        specials: &[String],
        pretok: PretokConfig,
        vocab_limit: usize,
    ) -> Self {
        let mut vocab: Vec<Token> = (0..=255u8).map(Token::Byte).collect();
        vocab.extend(specials.iter().cloned().map(Token::Special));
        let mut char_ids = HashMap::new();
        let mut text_ids = HashMap::new();
        for &c in &alphabet {
            let id = vocab.len() as TokenId;
            char_ids.insert(c, id);
            text_ids.insert(String::from(c), id);
            vocab.push(Token::Text(String::from(c)));
        }
        TokenizerModel {
            vocab,
            merges: Vec::new(),
            alphabet,
            specials: specials.to_vec(),
            pretok,
            vocab_limit,
            char_ids,
            text_ids,
            merge_ranks: HashMap::new(),
        }
    }

    /// Rebuilds a model from its serialized parts, replaying `merges` in order.
    /// An empty alphabet with no merges rebuilds a byte-only model.
    pub fn from_parts(
        alphabet: &BTreeSet<char>,
        specials: &[String],
        pretok: PretokConfig,
        vocab_limit: usize,
        merges: &[(String, String)],
    ) -> Result<Self> {
        if alphabet.is_empty() && merges.is_empty() {
            let floor = BYTE_TOKENS + specials.len();
            if vocab_limit < floor {
                return Err(Error::VocabTooSmall {
                    requested: vocab_limit,
                    floor,
                });
            }
            return Ok(Self::assemble(
                BTreeSet::new(),
                specials,
                pretok,
                vocab_limit,
            ));
        }
        let mut model = Self::base(alphabet, specials, pretok, vocab_limit)?;
        for (i, (left, right)) in merges.iter().enumerate() {
            let l = model.text_ids.get(left.as_str()).copied();
            let r = model.text_ids.get(right.as_str()).copied();
            match (l, r) {
                (Some(l), Some(r)) => {
                    model.push_merge(l, r);
                }
                _ => {
                    return Err(Error::Model(alloc::format!(
                        "merge {i} ({left:?}, {right:?}) uses a token not yet derived"
                    )))
                }
            }
        }
        if model.vocab.len() > vocab_limit {
            return Err(Error::Model(alloc::format!(
                "{} tokens exceed the vocabulary limit {vocab_limit}",
                model.vocab.len()
            )));
        }
        Ok(model)
    }

    /// Records a merge, allocating a new id unless the merged string already
    /// exists. Returns the merged id.
    pub(crate) fn push_merge(&mut self, left: TokenId, right: TokenId) -> TokenId {
        let mut merged = String::from(self.text_of(left));
        merged.push_str(self.text_of(right));
        let id = match self.text_ids.get(&merged) {
            Some(&id) => id,
            None => {
                let id = self.vocab.len() as TokenId;
                self.text_ids.insert(merged.clone(), id);
                self.vocab.push(Token::Text(merged));
                id
            }
        };
        let rank = self.merges.len() as u32;
        self.merges.push((left, right));
        self.merge_ranks.entry((left, right)).or_insert((rank, id));
        id
    }

    fn text_of(&self, id: TokenId) -> &str {
        match &self.vocab[id as usize] {
            Token::Text(s) => s,
            _ => unreachable!("merges only combine text tokens"),
        }
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab_limit(&self) -> usize {
        self.vocab_limit
    }

    pub fn vocab(&self) -> &[Token] {
        &self.vocab
    }

    pub fn token(&self, id: TokenId) -> Option<&Token> {
        self.vocab.get(id as usize)
    }

    /// Id of a text token, looked up by its marked string.
    pub fn text_id(&self, text: &str) -> Option<TokenId> {
        self.text_ids.get(text).copied()
    }

    pub fn byte_id(byte: u8) -> TokenId {
        TokenId::from(byte)
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn specials(&self) -> &[String] {
        &self.specials
    }

    pub fn pretok(&self) -> PretokConfig {
        self.pretok
    }

    pub fn merges(&self) -> &[(TokenId, TokenId)] {
        &self.merges
    }

    /// Merges as (left, right) token strings, in training order.
    pub fn merge_strings(&self) -> Vec<(String, String)> {
        self.merges
            .iter()
            .map(|&(l, r)| (self.text_of(l).into(), self.text_of(r).into()))
            .collect()
    }

    /// The model restricted to its first `n` merges.
    pub fn truncated(&self, n: usize) -> Self {
        let mut out = Self::assemble(
            self.alphabet.clone(),
            &self.specials,
            self.pretok,
            self.vocab_limit,
        );
        for &(l, r) in self.merges.iter().take(n) {
            // ids below the cut are identical in both models
            out.push_merge(l, r);
        }
        out
    }

    /// Encodes `text`: pre-tokenize, then apply merges by rank inside each
    /// piece. Scalars outside the vocabulary, and literal marker scalars,
    /// become their UTF-8 byte tokens.
    pub fn encode(&self, text: &str) -> Vec<TokenId> {
        let mut out = Vec::new();
        for piece in pretokenize(text, self.pretok) {
            self.encode_piece_into(piece.text, &mut out);
        }
        out
    }

    /// Token count of `text`, memoizing per-piece counts in `cache`.
    pub fn count_tokens_cached<'t>(
        &self,
        text: &'t str,
        cache: &mut HashMap<&'t str, usize>,
    ) -> usize {
        let mut scratch = Vec::new();
        pretokenize(text, self.pretok)
            .into_iter()
            .map(|piece| {
                *cache.entry(piece.text).or_insert_with(|| {
                    scratch.clear();
                    self.encode_piece_into(piece.text, &mut scratch);
                    scratch.len()
                })
            })
            .sum()
    }

    pub(crate) fn encode_piece_into(&self, piece: &str, out: &mut Vec<TokenId>) {
        let mut segment: Vec<TokenId> = Vec::new();
        for c in piece.chars() {
            let id = match c {
                ' ' => self.char_ids.get(&SPACE_MARKER),
                SPACE_MARKER => None,
                c => self.char_ids.get(&c),
            };
            match id {
                Some(&id) => segment.push(id),
                None => {
                    self.flush_segment(&mut segment, out);
                    let mut buf = [0u8; 4];
                    out.extend(c.encode_utf8(&mut buf).bytes().map(Self::byte_id));
                }
            }
        }
        self.flush_segment(&mut segment, out);
    }

    fn flush_segment(&self, segment: &mut Vec<TokenId>, out: &mut Vec<TokenId>) {
        if segment.is_empty() {
            return;
        }
        if !self.merge_ranks.is_empty() {
            self.apply_merges(segment);
        }
        out.append(segment);
    }

    fn apply_merges(&self, symbols: &mut Vec<TokenId>) {
        while symbols.len() > 1 {
            let best = symbols
                .windows(2)
                .filter_map(|w| self.merge_ranks.get(&(w[0], w[1])))
                .min_by_key(|(rank, _)| *rank)
                .copied();
            let Some((rank, merged)) = best else { break };
            let (left, right) = self.merges[rank as usize];
            let mut write = 0;
            let mut read = 0;
            while read < symbols.len() {
                if read + 1 < symbols.len() && symbols[read] == left && symbols[read + 1] == right {
                    symbols[write] = merged;
                    read += 2;
                } else {
                    symbols[write] = symbols[read];
                    read += 1;
                }
                write += 1;
            }
            symbols.truncate(write);
        }
    }

    /// Decodes ids back to text. Runs of byte tokens are reassembled as UTF-8;
    /// invalid sequences become U+FFFD.
    pub fn decode(&self, ids: &[TokenId]) -> Result<String> {
        let mut out = String::new();
        let mut bytes: Vec<u8> = Vec::new();
        for &id in ids {
            let token = self.vocab.get(id as usize).ok_or(Error::TokenOutOfRange {
                id,
                len: self.vocab.len(),
            })?;
            match token {
                Token::Byte(b) => bytes.push(*b),
                Token::Special(s) => {
                    flush_bytes(&mut bytes, &mut out);
                    out.push_str(s);
                }
                Token::Text(s) => {
                    flush_bytes(&mut bytes, &mut out);
                    out.extend(s.chars().map(|c| if c == SPACE_MARKER { ' ' } else { c }));
                }
            }
        }
        flush_bytes(&mut bytes, &mut out);
        Ok(out)
    }
}

fn flush_bytes(bytes: &mut Vec<u8>, out: &mut String) {
    if !bytes.is_empty() {
        out.push_str(&String::from_utf8_lossy(bytes));
        bytes.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn alphabet(s: &str) -> BTreeSet<char> {
        s.chars().collect()
    }

    fn toy() -> TokenizerModel {
        let merges = vec![
            ("a".to_string(), "b".to_string()),
            ("ab".to_string(), "c".to_string()),
            ("▁".to_string(), "abc".to_string()),
        ];
        TokenizerModel::from_parts(&alphabet("abc"), &[], PretokConfig::default(), 300, &merges)
            .unwrap()
    }

    #[test]
    fn ids_are_laid_out_bytes_specials_alphabet_merges() {
        let specials = vec!["<s>".to_string()];
        let m =
            TokenizerModel::base(&alphabet("ba"), &specials, PretokConfig::default(), 300).unwrap();
        assert_eq!(m.token(0), Some(&Token::Byte(0)));
        assert_eq!(m.token(255).unwrap().display(), "<0xFF>");
        assert_eq!(m.token(256), Some(&Token::Special("<s>".into())));
        assert_eq!(m.text_id("a"), Some(257));
        assert_eq!(m.text_id("b"), Some(258));
        assert_eq!(m.text_id("▁"), Some(259));
        assert_eq!(m.vocab_len(), 260);
    }

    #[test]
    fn seed_scalar_without_merges_is_one_token() {
        let m = TokenizerModel::base(&alphabet("अ"), &[], PretokConfig::default(), 300).unwrap();
        assert_eq!(m.encode("अ"), vec![m.text_id("अ").unwrap()]);
    }

    #[test]
    fn unknown_scalar_falls_back_to_bytes() {
        let m = toy();
        let ids = m.encode("\u{1F600}");
        assert_eq!(ids, vec![0xF0, 0x9F, 0x98, 0x80]);
        assert_eq!(m.decode(&ids).unwrap(), "😀");
    }

    #[test]
    fn merges_apply_by_rank() {
        let m = toy();
        assert_eq!(
            m.encode("abc abc"),
            vec![m.text_id("abc").unwrap(), m.text_id("▁abc").unwrap()]
        );
        assert_eq!(m.encode("ab"), vec![m.text_id("ab").unwrap()]);
        assert_eq!(m.decode(&m.encode("cab abca")).unwrap(), "cab abca");
    }

    #[test]
    fn literal_marker_round_trips_through_bytes() {
        let m = toy();
        let ids = m.encode("a▁b");
        assert_eq!(ids.len(), 5);
        assert_eq!(m.decode(&ids).unwrap(), "a▁b");
    }

    #[test]
    fn decode_edge_cases() {
        let m = toy();
        assert_eq!(m.decode(&[]).unwrap(), "");
        assert_eq!(m.decode(&[0xF0, 0x9F]).unwrap(), "\u{FFFD}");
        let len = m.vocab_len() as u32;
        assert_eq!(
            m.decode(&[len]),
            Err(Error::TokenOutOfRange {
                id: len,
                len: len as usize
            })
        );
    }

    #[test]
    fn byte_only_model_spends_one_token_per_byte() {
        let m = TokenizerModel::byte_only(PretokConfig::default());
        assert_eq!(m.vocab_len(), 256);
        assert_eq!(m.encode("a b").len(), 3);
        assert_eq!(m.encode("न").len(), 3);
        assert_eq!(m.decode(&m.encode("a b न")).unwrap(), "a b न");
    }

    #[test]
    fn from_parts_rejects_underived_merges() {
        let merges = vec![("ab".to_string(), "c".to_string())];
        let err = TokenizerModel::from_parts(
            &alphabet("abc"),
            &[],
            PretokConfig::default(),
            300,
            &merges,
        );
        assert!(matches!(err, Err(Error::Model(_))));
    }

    #[test]
    fn vocab_limit_floor_is_enforced() {
        let err = TokenizerModel::base(&alphabet("abc"), &[], PretokConfig::default(), 259);
        assert_eq!(
            err.unwrap_err(),
            Error::VocabTooSmall {
                requested: 259,
                floor: 260
            }
        );
    }

    #[test]
    fn truncation_keeps_prefix_of_merges() {
        let m = toy();
        let t = m.truncated(1);
        assert_eq!(t.merges().len(), 1);
        assert_eq!(t.encode("abc").len(), 2);
        assert_eq!(t.text_id("ab"), m.text_id("ab"));
    }
}

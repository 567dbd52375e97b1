//! Authentication material: identities and the keyed hash `t_i`.

use hmac::{Hmac, Mac};
use rand::Rng;
use sha2::Sha256;

use crate::bits::BitString;

/// Identifier recorded in transcripts for the keyed hash below.
pub const HASH_FUNCTION_ID: &str = "hmac-sha256-ctr";

const NONCE_BYTES: usize = 16;

type HmacSha256 = Hmac<Sha256>;

/// A participant's public identity and the key it shares with TP.
#[derive(Clone, Debug)]
pub struct PartyIdentity {
    /// 1-based.
    pub party_id: usize,
    pub public_id: Vec<u8>,
    pub private_key: Vec<u8>,
}

impl PartyIdentity {
    pub fn generate<R: Rng + ?Sized>(party_id: usize, rng: &mut R) -> Self {
        PartyIdentity {
            party_id,
            public_id: format!("P{party_id}").into_bytes(),
            private_key: random_nonce(rng),
        }
    }
}

/// 128-bit random number.
pub fn random_nonce<R: Rng + ?Sized>(rng: &mut R) -> Vec<u8> {
    let mut bytes = vec![0u8; NONCE_BYTES];
    rng.fill_bytes(&mut bytes);
    bytes
}

/// The L-bit tag selecting I or H at each position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthTag(pub BitString);

impl AuthTag {
    pub fn bit(&self, position: usize) -> bool {
        self.0.get(position)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `t = h_k(ID ‖ r_i ‖ r_T)` truncated to `len` bits.
///
/// HMAC-SHA256 keyed with `private_key`, expanded by counter mode: block `j`
/// is `HMAC(k, be32(j) ‖ msg)` and the tag is the first `len` bits of the
/// concatenated blocks, most significant bit first. The three message
/// fields are length-prefixed so the concatenation is unambiguous.
pub fn derive_auth_tag(
    private_key: &[u8],
    public_id: &[u8],
    r_party: &[u8],
    r_tp: &[u8],
    len: usize,
) -> AuthTag {
    let mut message = Vec::with_capacity(12 + public_id.len() + r_party.len() + r_tp.len());
    for field in [public_id, r_party, r_tp] {
        message.extend_from_slice(&(field.len() as u32).to_be_bytes());
        message.extend_from_slice(field);
    }

    let mut bits = Vec::with_capacity(len);
    let mut counter: u32 = 0;
    while bits.len() < len {
        let mut mac = HmacSha256::new_from_slice(private_key).expect("HMAC accepts any key length");
        mac.update(&counter.to_be_bytes());
        mac.update(&message);
        let block = mac.finalize().into_bytes();
        for byte in block {
            for shift in (0..8).rev() {
                if bits.len() == len {
                    break;
                }
                bits.push((byte >> shift) & 1 == 1);
            }
        }
        counter += 1;
    }
    AuthTag(BitString::new(bits))
}

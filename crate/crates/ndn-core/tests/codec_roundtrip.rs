use ndn_core::tlv::{decode_var_number, encode_var_number};
use ndn_core::{decode_packet, encode_packet, Component, Data, Interest, KeyPair, Name, Packet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn component() -> impl Strategy<Value = Component> {
    prop_oneof![
        4 => prop::collection::vec(any::<u8>(), 0..40).prop_map(Component::generic),
        1 => any::<u64>().prop_map(Component::version),
        1 => (0u64..100_000).prop_map(Component::segment),
    ]
}

fn name() -> impl Strategy<Value = Name> {
    prop::collection::vec(component(), 1..8).prop_map(Name::from_components)
}

fn data() -> impl Strategy<Value = Data> {
    (
        name(),
        prop::collection::vec(any::<u8>(), 0..2048),
        any::<u32>(),
        prop::option::of((0u64..50).prop_map(Component::segment)),
        name(),
        prop::collection::vec(any::<u8>(), 0..16),
        prop::collection::vec(any::<u8>(), 0..80),
    )
        .prop_map(|(n, content, fresh, fb, kl, nonce, sig)| {
            let mut d = Data::new(n, content).with_freshness(u64::from(fresh));
            d.final_block_id = fb;
            d.key_locator = kl;
            d.signature_nonce = nonce;
            d.signature = sig;
            d
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn data_round_trips_and_reencodes_identically(d in data()) {
        let bytes = encode_packet(&Packet::Data(d.clone())).unwrap();
        let back = decode_packet(&bytes).unwrap();
        prop_assert_eq!(&back, &Packet::Data(d));
        prop_assert_eq!(encode_packet(&back).unwrap(), bytes);
    }

    #[test]
    fn interest_round_trips(n in name(), cbp: bool, mbf: bool, nonce: [u8; 4], life in 1u64..100_000) {
        let mut i = Interest::new(n).can_be_prefix(cbp).must_be_fresh(mbf).lifetime(life);
        i.nonce = nonce;
        let bytes = encode_packet(&Packet::Interest(i.clone())).unwrap();
        prop_assert_eq!(decode_packet(&bytes).unwrap(), Packet::Interest(i));
    }

    #[test]
    fn var_numbers_round_trip(v: u64) {
        let mut buf = Vec::new();
        encode_var_number(v, &mut buf);
        prop_assert_eq!(decode_var_number(&buf).unwrap(), (v, buf.len()));
    }

    #[test]
    fn truncation_never_decodes(d in data(), cut in 1usize..64) {
        let bytes = encode_packet(&Packet::Data(d)).unwrap();
        let cut = cut.min(bytes.len());
        prop_assert!(decode_packet(&bytes[..bytes.len() - cut]).is_err());
    }
}

#[test]
fn signed_data_survives_the_wire() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let key = KeyPair::generate(&mut rng);
    let cert: Name = "/org/x/KEY/00/self/v=1".parse().unwrap();
    let d = ndn_core::sign_data(Data::new("/org/x/a".parse().unwrap(), b"hello".to_vec()), &key, &cert, &mut rng);
    let back = Data::decode(&d.encode().unwrap()).unwrap();
    assert!(ndn_core::verify_data(&back, &key.public_key()));
}

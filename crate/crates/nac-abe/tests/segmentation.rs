use nac_abe::{publish_segments, FetchOptions, Identity, NacError, Publisher, SegmentSpec, Session, DEFAULT_MSS};
use ndn_core::{ContentType, Interest, LinkPolicy, Name, Sim};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use trust_schema::{load_schema, mhealth_schema_text, Outcome, Validator};

struct Setup {
    sim: Sim,
    session: Session,
    publisher: Publisher,
    producer: Identity,
    rng: ChaCha20Rng,
}

fn setup(seed: u64, loss: f64) -> Setup {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let anchor = Identity::anchor("/org/mhealth".parse().unwrap(), &mut rng);
    let producer = Identity::issued("/org/mhealth/producer/alice".parse().unwrap(), &anchor, &mut rng);
    let schema = load_schema(&mhealth_schema_text(anchor.cert())).unwrap();
    let mut sim = Sim::new(seed);
    let a = sim.add_node("consumer");
    let b = sim.add_node("producer");
    sim.connect(a, b, LinkPolicy::new(10, loss));
    let data_prefix: Name = "/org/mhealth/diabetes".parse().unwrap();
    let publisher = Publisher::attach(&mut sim, b, &[producer.name(), &data_prefix]).unwrap();
    publisher.publish(producer.cert().data().clone());
    let face = sim.add_app_face(a);
    let session = Session::new(face, Validator::new(schema), FetchOptions::default());
    Setup {
        sim,
        session,
        publisher,
        producer,
        rng,
    }
}

fn publish(s: &mut Setup, name: &Name, len: usize) -> Vec<u8> {
    let mut bytes = vec![0u8; len];
    s.rng.fill_bytes(&mut bytes);
    let spec = SegmentSpec {
        name,
        mss: DEFAULT_MSS,
        freshness_ms: 3_600_000,
        content_type: ContentType::Blob,
    };
    let obj = publish_segments(spec, &bytes, &s.producer, &mut s.rng).unwrap();
    assert_eq!(obj.segment_count(), len.div_ceil(DEFAULT_MSS));
    s.publisher.publish_object(&obj);
    bytes
}

fn first(name: &Name) -> Interest {
    Interest::new(name.clone()).can_be_prefix(true)
}

#[test]
fn byte_identity_without_loss() {
    let mut s = setup(1, 0.0);
    for (i, len) in [1usize, 1499, 1500, 1501, 15000].into_iter().enumerate() {
        let name: Name = format!("/org/mhealth/diabetes/blob{i}/v=1").parse().unwrap();
        let bytes = publish(&mut s, &name, len);
        let opts = s.session.options;
        let got = s.session.fetch_object(&mut s.sim, &first(&name), opts).unwrap();
        assert_eq!(got.bytes(), bytes, "len {len}");
        assert_eq!(got.segments.len(), len.div_ceil(DEFAULT_MSS));
        assert_eq!(got.stats.decreases, 0);
        if len == 15000 {
            assert!(got.stats.max_window() > 1.0);
            assert_eq!(got.stats.interests, 10);
        }
        if len <= 1500 {
            assert_eq!(got.stats.interests, 1);
        }
    }
}

#[test]
fn lossy_link_twenty_of_twenty() {
    let mut decreases = 0;
    let mut completed = 0;
    for trial in 0..20 {
        let mut s = setup(100 + trial, 0.2);
        let name: Name = "/org/mhealth/diabetes/blob/v=1".parse().unwrap();
        let bytes = publish(&mut s, &name, 15000);
        let opts = s.session.options;
        let got = s.session.fetch_object(&mut s.sim, &first(&name), opts).unwrap();
        assert_eq!(got.bytes(), bytes);
        decreases += got.stats.decreases;
        completed += 1;
    }
    assert_eq!(completed, 20);
    assert!(decreases >= 1);
}

#[test]
fn discovery_picks_latest_version() {
    let mut s = setup(2, 0.0);
    let v1: Name = "/org/mhealth/diabetes/obj/v=1".parse().unwrap();
    let v2: Name = "/org/mhealth/diabetes/obj/v=2".parse().unwrap();
    publish(&mut s, &v1, 3000);
    let newest = publish(&mut s, &v2, 4000);
    let prefix: Name = "/org/mhealth/diabetes/obj".parse().unwrap();
    let got = s.session.discover(&mut s.sim, &prefix).unwrap();
    assert_eq!(got.name, v2);
    assert_eq!(got.bytes(), newest);
}

#[test]
fn bad_segment_aborts_fetch() {
    let mut s = setup(3, 0.0);
    let name: Name = "/org/mhealth/diabetes/bad/v=1".parse().unwrap();
    let mut bytes = vec![0u8; 5000];
    s.rng.fill_bytes(&mut bytes);
    let spec = SegmentSpec {
        name: &name,
        mss: DEFAULT_MSS,
        freshness_ms: 0,
        content_type: ContentType::Blob,
    };
    let mut obj = publish_segments(spec, &bytes, &s.producer, &mut s.rng).unwrap();
    obj.segments[2].content[0] ^= 1;
    s.publisher.publish_object(&obj);
    let opts = s.session.options;
    let err = s.session.fetch_object(&mut s.sim, &first(&name), opts).unwrap_err();
    assert!(matches!(err, NacError::Validation { outcome: Outcome::InvalidSignature, .. }), "{err:?}");
}

#[test]
fn unreachable_object_times_out_after_retries() {
    let mut s = setup(4, 0.0);
    let name: Name = "/org/mhealth/diabetes/missing/v=1".parse().unwrap();
    let opts = FetchOptions::default().with_max_retries(3);
    let t0 = s.sim.now();
    let err = s.session.fetch_object(&mut s.sim, &first(&name), opts).unwrap_err();
    assert!(matches!(err, NacError::Timeout(_)));
    assert_eq!(s.sim.now() - t0, 4 * opts.lifetime_ms);
}

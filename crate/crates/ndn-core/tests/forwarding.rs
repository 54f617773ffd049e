use std::cell::{Cell, RefCell};
use std::rc::Rc;

use ndn_core::sim::{InterestHandler, LinkPolicy};
use ndn_core::{Data, FaceEvent, Interest, Name, SimError, Sim};

fn n(s: &str) -> Name {
    s.parse().unwrap()
}

fn echo(fresh_ms: u64) -> InterestHandler {
    Box::new(move |i: &Interest| Some(Data::new(i.name.clone(), b"payload".to_vec()).with_freshness(fresh_ms)))
}

/// consumer app - r0 - r1 - producer app
fn line(policy: LinkPolicy) -> (Sim, usize, usize) {
    line_seeded(11, policy)
}

fn line_seeded(seed: u64, policy: LinkPolicy) -> (Sim, usize, usize) {
    let mut sim = Sim::new(seed);
    let r0 = sim.add_node("r0");
    let r1 = sim.add_node("r1");
    sim.connect(r0, r1, policy);
    let consumer = sim.add_app_face(r0);
    let producer = sim.add_app_face(r1);
    (sim, consumer, producer)
}

#[test]
fn registered_producer_answers() {
    let (mut sim, c, p) = line(LinkPolicy::default());
    let reg = sim.register_prefix(p, n("/org/mhealth"), echo(1000)).unwrap();
    let d = sim.fetch(c, Interest::new(n("/org/mhealth/x"))).unwrap();
    assert_eq!(d.name, n("/org/mhealth/x"));
    assert_eq!(sim.handler_invocations(reg), 1);
    assert_eq!(sim.now(), 10);
}

#[test]
fn unregistered_name_times_out_after_lifetime() {
    let (mut sim, c, _) = line(LinkPolicy::default());
    let err = sim.fetch(c, Interest::new(n("/nobody/home")).lifetime(700)).unwrap_err();
    assert_eq!(err.name, n("/nobody/home"));
    assert_eq!(sim.now(), 700);
    assert_eq!(sim.counters().timeouts, 1);
}

#[test]
fn exact_interest_shorter_than_prefix_times_out() {
    let (mut sim, c, p) = line(LinkPolicy::default());
    sim.register_prefix(p, n("/a/b"), echo(1000)).unwrap();
    assert!(sim.fetch(c, Interest::new(n("/a"))).is_err());
}

#[test]
fn second_fetch_is_served_from_content_store() {
    let (mut sim, c, p) = line(LinkPolicy::default());
    let reg = sim.register_prefix(p, n("/org"), echo(0)).unwrap();
    sim.fetch(c, Interest::new(n("/org/item"))).unwrap();
    sim.fetch(c, Interest::new(n("/org/item"))).unwrap();
    assert_eq!(sim.handler_invocations(reg), 1);
    assert!(sim.counters().cache_hits >= 1);
}

#[test]
fn stale_content_is_not_served_to_must_be_fresh() {
    let (mut sim, c, p) = line(LinkPolicy::default());
    let reg = sim.register_prefix(p, n("/org"), echo(100)).unwrap();
    let fresh = || Interest::new(n("/org/item")).must_be_fresh(true);
    sim.fetch(c, fresh()).unwrap();
    sim.fetch(c, fresh()).unwrap();
    assert_eq!(sim.handler_invocations(reg), 1);
    sim.advance(200);
    sim.fetch(c, fresh()).unwrap();
    assert_eq!(sim.handler_invocations(reg), 2);
}

#[test]
fn longest_prefix_wins_among_faces() {
    let mut sim = Sim::new(1);
    let r = sim.add_node("r");
    let c = sim.add_app_face(r);
    let short = sim.add_app_face(r);
    let long = sim.add_app_face(r);
    let a = sim.register_prefix(short, n("/a"), echo(0)).unwrap();
    let ab = sim.register_prefix(long, n("/a/b"), echo(0)).unwrap();
    sim.fetch(c, Interest::new(n("/a/b/c"))).unwrap();
    sim.fetch(c, Interest::new(n("/a/x"))).unwrap();
    assert_eq!(sim.handler_invocations(ab), 1);
    assert_eq!(sim.handler_invocations(a), 1);
}

#[test]
fn routing_matches_brute_force_longest_prefix() {
    let prefixes = ["/a", "/a/b", "/a/b/c", "/b", "/a/c/d", "/c/d"];
    let mut sim = Sim::new(2);
    let hub = sim.add_node("hub");
    let c = sim.add_app_face(hub);
    let mut regs = Vec::new();
    for p in prefixes {
        let leaf = sim.add_node(p);
        sim.connect(hub, leaf, LinkPolicy::new(1, 0.0));
        let f = sim.add_app_face(leaf);
        regs.push(sim.register_prefix(f, n(p), echo(0)).unwrap());
    }
    let probes = ["/a/b/c/d", "/a/b/x", "/a/z", "/a/c/d/e", "/a/c", "/b/q", "/c/d", "/c/e"];
    for probe in probes {
        let name = n(probe);
        let before: Vec<u64> = regs.iter().map(|r| sim.handler_invocations(*r)).collect();
        let got = sim.fetch(c, Interest::new(name.clone()).lifetime(100));
        let expected = prefixes
            .iter()
            .enumerate()
            .filter(|(_, p)| n(p).is_prefix_of(&name))
            .max_by_key(|(_, p)| n(p).len())
            .map(|(i, _)| i);
        let after: Vec<u64> = regs.iter().map(|r| sim.handler_invocations(*r)).collect();
        let hit: Vec<usize> = (0..regs.len()).filter(|&i| after[i] != before[i]).collect();
        match expected {
            Some(i) => {
                assert!(got.is_ok(), "{probe}");
                assert_eq!(hit, vec![i], "{probe}");
            }
            None => {
                assert!(got.is_err(), "{probe}");
                assert!(hit.is_empty());
            }
        }
    }
}

#[test]
fn duplicate_registration_and_empty_prefix_rejected() {
    let (mut sim, _, p) = line(LinkPolicy::default());
    sim.register_prefix(p, n("/a"), echo(0)).unwrap();
    assert!(matches!(
        sim.register_prefix(p, n("/a"), echo(0)),
        Err(SimError::DuplicateRegistration(_))
    ));
    assert!(matches!(sim.register_prefix(p, Name::new(), echo(0)), Err(SimError::EmptyPrefix)));
}

#[test]
fn pending_interests_are_aggregated_and_consumed_once() {
    let mut sim = Sim::new(5);
    let r = sim.add_node("r");
    let p = sim.add_app_face(r);
    let consumers: Vec<_> = (0..4).map(|_| sim.add_app_face(r)).collect();
    // A producer that never answers on its own keeps the PIT entry open.
    let reg = sim.register_prefix(p, n("/slow"), Box::new(|_| None)).unwrap();
    let ids: Vec<_> = consumers
        .iter()
        .map(|&c| sim.express_interest(c, Interest::new(n("/slow/x"))).unwrap())
        .collect();
    sim.advance(10);
    assert_eq!(sim.handler_invocations(reg), 1);
    assert_eq!(sim.node(r).pit.len(), 1);

    sim.put_data(p, Data::new(n("/slow/x"), b"late".to_vec())).unwrap();
    for (&c, id) in consumers.iter().zip(ids) {
        match sim.wait_for(c, id) {
            Some(FaceEvent::Data { data, .. }) => assert_eq!(data.content, b"late"),
            other => panic!("expected data, got {other:?}"),
        }
    }
    assert_eq!(sim.node(r).pit.len(), 0);

    sim.put_data(p, Data::new(n("/slow/x"), b"again".to_vec())).unwrap();
    sim.run_until_idle();
    assert_eq!(sim.counters().unsolicited_data, 1);
    for &c in &consumers {
        assert_eq!(sim.next_event(c), None);
    }
}

#[test]
fn unsolicited_data_is_dropped() {
    let mut sim = Sim::new(5);
    let r = sim.add_node("r");
    let p = sim.add_app_face(r);
    let c = sim.add_app_face(r);
    sim.register_prefix(p, n("/x"), echo(0)).unwrap();
    sim.fetch(c, Interest::new(n("/x/1"))).unwrap();
    let before = sim.counters().data_delivered;
    sim.run_until_idle();
    assert_eq!(sim.counters().data_delivered, before);
    assert_eq!(sim.node(r).pit.len(), 0);
}

#[test]
fn total_loss_times_out_every_interest() {
    let (mut sim, c, p) = line(LinkPolicy::new(5, 1.0));
    let reg = sim.register_prefix(p, n("/a"), echo(0)).unwrap();
    for i in 0..20 {
        assert!(sim.fetch(c, Interest::new(n(&format!("/a/{i}"))).lifetime(50)).is_err());
    }
    assert_eq!(sim.handler_invocations(reg), 0);
    assert_eq!(sim.counters().timeouts, 20);
}

#[test]
fn callbacks_fire_exactly_once() {
    let (mut sim, c, p) = line(LinkPolicy::default());
    sim.register_prefix(p, n("/a"), echo(0)).unwrap();
    let hits = Rc::new(Cell::new(0));
    let misses = Rc::new(Cell::new(0));
    for name in ["/a/1", "/b/1"] {
        let (h, m) = (hits.clone(), misses.clone());
        sim.express_interest_with(
            c,
            Interest::new(n(name)).lifetime(100),
            move |_| h.set(h.get() + 1),
            move |_| m.set(m.get() + 1),
        )
        .unwrap();
    }
    sim.run_until_idle();
    assert_eq!((hits.get(), misses.get()), (1, 1));
}

#[test]
fn detached_producer_content_still_served_from_cache() {
    let (mut sim, c, p) = line(LinkPolicy::default());
    let repo = Rc::new(RefCell::new(ndn_core::Repo::new()));
    repo.borrow_mut().insert(Data::new(n("/p/obj/v=1"), b"one".to_vec()).with_freshness(10));
    sim.register_prefix(p, n("/p"), ndn_core::repo_handler(repo)).unwrap();
    sim.fetch(c, Interest::new(n("/p/obj")).can_be_prefix(true)).unwrap();
    sim.detach_face(p);
    let d = sim.fetch(c, Interest::new(n("/p/obj")).can_be_prefix(true)).unwrap();
    assert_eq!(d.content, b"one");
}

#[test]
fn same_seed_same_trace() {
    let run = |seed| {
        let (mut sim, c, p) = line_seeded(seed, LinkPolicy::new(3, 0.3));
        sim.register_prefix(p, n("/a"), echo(0)).unwrap();
        (0..50)
            .map(|i| sim.fetch(c, Interest::new(n(&format!("/a/{i}"))).lifetime(40)).is_ok())
            .collect::<Vec<_>>()
    };
    assert_eq!(run(1), run(1));
    assert_ne!(run(1), run(2));
}

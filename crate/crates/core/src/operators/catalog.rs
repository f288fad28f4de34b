//! The operator table and the factory that instantiates its entries.
//!
//! Adding an operator takes three steps: a descriptor row in [`CATALOG`],
//! a locator (an existing one configured differently, or a new
//! [`Locator`](super::Locator) implementation) and a transformation, wired
//! together in [`instantiate_operator_with`].

use super::locators::{
    ActivityLocator, ArgumentLocator, ArgumentRule, AssignmentLocator, BuggyGuiListenerLocator, CloseLocator,
    CursorIndexLocator, FirstStatementLocator, InvalidIdLocator, LiteralLocator, LiteralRule, XmlLocator,
};
use super::transforms::{Delay, Delete, InsertDelay, NullAfterStatement, NullBeforeLine, Replace, Replacement};
use super::{Category, Operator, OperatorConfig, OperatorDescriptor, OperatorError};
use crate::pfp::{NameMatch, XmlPattern};
use crate::project::FileKind;

const fn op(
    id: &'static str,
    category: Category,
    target_domain: FileKind,
    summary: &'static str,
    captures_required: &'static [&'static str],
    deterministic_seed_sensitive: bool,
) -> OperatorDescriptor {
    OperatorDescriptor {
        id,
        category,
        target_domain,
        summary,
        captures_required,
        deterministic_seed_sensitive,
    }
}

use Category::*;
use FileKind::{Manifest, ResourceXml, SubjectSource};

/// Every operator, grouped by category, in listing order.
pub static CATALOG: [OperatorDescriptor; 24] = [
    op(
        "NullIntent",
        ActivitiesIntents,
        SubjectSource,
        "Assign null to an Intent variable right after it is constructed",
        &["object"],
        false,
    ),
    op(
        "InvalidKeyIntentPutExtra",
        ActivitiesIntents,
        SubjectSource,
        "Replace the literal key of putExtra with a random string",
        &[],
        true,
    ),
    op(
        "NullValueIntentPutExtra",
        ActivitiesIntents,
        SubjectSource,
        "Pass null as the value of putExtra",
        &[],
        false,
    ),
    op(
        "WrongMainActivity",
        ActivitiesIntents,
        Manifest,
        "Point the launcher activity declaration at a different activity",
        &["replacement"],
        false,
    ),
    op(
        "ActivityNotDefined",
        ActivitiesIntents,
        Manifest,
        "Delete a non-launcher activity from the manifest",
        &[],
        false,
    ),
    op(
        "BuggyGUIListener",
        GuiComponents,
        SubjectSource,
        "Register a null click listener",
        &[],
        false,
    ),
    op(
        "FindViewByIdReturnsNull",
        GuiComponents,
        SubjectSource,
        "Assign null to a view right after it is looked up",
        &["object"],
        false,
    ),
    op(
        "ViewComponentNotVisible",
        GuiComponents,
        SubjectSource,
        "Make a view invisible instead of the requested visibility",
        &[],
        false,
    ),
    op(
        "InvalidIDFindView",
        GuiComponents,
        SubjectSource,
        "Look a view up by a different resource id",
        &["id"],
        false,
    ),
    op(
        "InvalidColor",
        GuiComponents,
        ResourceXml,
        "Complement the colour channels of a hex colour attribute",
        &[],
        false,
    ),
    op(
        "LengthyGUIListener",
        Responsiveness,
        SubjectSource,
        "Sleep at the start of an onClick handler",
        &[],
        false,
    ),
    op(
        "LengthyGUICreation",
        Responsiveness,
        SubjectSource,
        "Busy-wait at the start of onCreate(Bundle)",
        &[],
        false,
    ),
    op(
        "NullInputStream",
        Io,
        SubjectSource,
        "Set an input stream or reader to null before it is closed",
        &["object"],
        false,
    ),
    op(
        "NullOutputStream",
        Io,
        SubjectSource,
        "Set an output stream or writer to null before it is closed",
        &["object"],
        false,
    ),
    op(
        "InvalidFilePath",
        Io,
        SubjectSource,
        "Reverse the file name of a path passed to a file API",
        &[],
        false,
    ),
    op(
        "ClosingNullCursor",
        Database,
        SubjectSource,
        "Set a cursor to null before it is closed",
        &["object"],
        false,
    ),
    op(
        "InvalidSQLQuery",
        Database,
        SubjectSource,
        "Corrupt the leading keyword of an SQL string",
        &[],
        false,
    ),
    op(
        "InvalidIndexQueryParameter",
        Database,
        SubjectSource,
        "Shift a cursor column index by one",
        &[],
        false,
    ),
    op(
        "InvalidURI",
        Connectivity,
        SubjectSource,
        "Corrupt the host of an http(s) URI literal",
        &[],
        false,
    ),
    op(
        "InvalidDate",
        DataFormat,
        SubjectSource,
        "Swap day and month letters in a date format pattern",
        &[],
        false,
    ),
    op(
        "LengthyBackEndService",
        BackEndServices,
        SubjectSource,
        "Sleep at the start of a background task or service start",
        &[],
        false,
    ),
    op(
        "MissingPermissionManifest",
        ManifestPermissions,
        Manifest,
        "Delete a uses-permission declaration",
        &[],
        false,
    ),
    op(
        "SDKVersionUnderflow",
        ManifestPermissions,
        Manifest,
        "Set minSdkVersion to 1",
        &[],
        false,
    ),
    op(
        "InvalidLabel",
        Resources,
        Manifest,
        "Replace an application or activity label with a random string",
        &[],
        true,
    ),
];

/// The catalog in stable order.
pub fn list_operators() -> &'static [OperatorDescriptor] {
    &CATALOG
}

pub fn instantiate_operator(id: &str) -> Result<Operator, OperatorError> {
    instantiate_operator_with(id, &OperatorConfig::default())
}

pub fn instantiate_operator_with(id: &str, config: &OperatorConfig) -> Result<Operator, OperatorError> {
    let descriptor = CATALOG
        .iter()
        .find(|d| d.id == id)
        .ok_or_else(|| OperatorError::UnknownOperator(id.to_string()))?;
    let (locator, transformation): (Box<dyn super::Locator>, Box<dyn super::Transformation>) = match id {
        "NullIntent" => (
            Box::new(AssignmentLocator {
                id: "NullIntent",
                names: &["Intent"],
                constructor: true,
            }),
            Box::new(NullAfterStatement),
        ),
        "InvalidKeyIntentPutExtra" => (
            Box::new(ArgumentLocator {
                id: "InvalidKeyIntentPutExtra",
                names: &["putExtra"],
                rule: ArgumentRule::LiteralKey,
            }),
            Box::new(Replace(Replacement::RandomLiteral(config.random_key_len))),
        ),
        "NullValueIntentPutExtra" => (
            Box::new(ArgumentLocator {
                id: "NullValueIntentPutExtra",
                names: &["putExtra"],
                rule: ArgumentRule::Replaceable {
                    index: 1,
                    arity: 2,
                    unless: &["null"],
                },
            }),
            Box::new(Replace(Replacement::Fixed("null"))),
        ),
        "WrongMainActivity" => (
            Box::new(ActivityLocator { launcher: true }),
            Box::new(Replace(Replacement::Captured)),
        ),
        "ActivityNotDefined" => (Box::new(ActivityLocator { launcher: false }), Box::new(Delete)),
        "BuggyGUIListener" => (
            Box::new(BuggyGuiListenerLocator),
            Box::new(Replace(Replacement::Fixed("null"))),
        ),
        "FindViewByIdReturnsNull" => (
            Box::new(AssignmentLocator {
                id: "FindViewByIdReturnsNull",
                names: &["findViewById"],
                constructor: false,
            }),
            Box::new(NullAfterStatement),
        ),
        "ViewComponentNotVisible" => (
            Box::new(ArgumentLocator {
                id: "ViewComponentNotVisible",
                names: &["setVisibility"],
                rule: ArgumentRule::Replaceable {
                    index: 0,
                    arity: 1,
                    unless: &["View.INVISIBLE", "android.view.View.INVISIBLE"],
                },
            }),
            Box::new(Replace(Replacement::Fixed("View.INVISIBLE"))),
        ),
        "InvalidIDFindView" => (Box::new(InvalidIdLocator), Box::new(Replace(Replacement::CapturedId))),
        "InvalidColor" => (
            Box::new(XmlLocator {
                id: "InvalidColor",
                pattern: XmlPattern::attribute(
                    NameMatch::Any,
                    Some("^#(?:[0-9A-Fa-f]{3}|[0-9A-Fa-f]{4}|[0-9A-Fa-f]{6}|[0-9A-Fa-f]{8})$"),
                    &[],
                ),
                reject_values: &[],
            }),
            Box::new(Replace(Replacement::ComplementColor)),
        ),
        "LengthyGUIListener" => (
            Box::new(FirstStatementLocator {
                id: "LengthyGUIListener",
                names: &["onClick"],
                parameter_type: None,
            }),
            Box::new(InsertDelay(Delay::Sleep(config.gui_listener_sleep_ms))),
        ),
        "LengthyGUICreation" => (
            Box::new(FirstStatementLocator {
                id: "LengthyGUICreation",
                names: &["onCreate"],
                parameter_type: Some("Bundle"),
            }),
            Box::new(InsertDelay(Delay::BusyLoop(config.busy_loop_iterations))),
        ),
        "NullInputStream" => (
            Box::new(CloseLocator {
                id: "NullInputStream",
                type_keywords: config.input_stream_types.clone(),
            }),
            Box::new(NullBeforeLine),
        ),
        "NullOutputStream" => (
            Box::new(CloseLocator {
                id: "NullOutputStream",
                type_keywords: config.output_stream_types.clone(),
            }),
            Box::new(NullBeforeLine),
        ),
        "InvalidFilePath" => (
            Box::new(LiteralLocator {
                id: "InvalidFilePath",
                rule: LiteralRule::FilePath,
            }),
            Box::new(Replace(Replacement::ReverseFileName)),
        ),
        "ClosingNullCursor" => (
            Box::new(CloseLocator {
                id: "ClosingNullCursor",
                type_keywords: config.cursor_types.clone(),
            }),
            Box::new(NullBeforeLine),
        ),
        "InvalidSQLQuery" => (
            Box::new(LiteralLocator {
                id: "InvalidSQLQuery",
                rule: LiteralRule::SqlQuery,
            }),
            Box::new(Replace(Replacement::BreakSqlKeyword)),
        ),
        "InvalidIndexQueryParameter" => (
            Box::new(CursorIndexLocator {
                cursor_types: config.cursor_types.clone(),
            }),
            Box::new(Replace(Replacement::IncrementInteger)),
        ),
        "InvalidURI" => (
            Box::new(LiteralLocator {
                id: "InvalidURI",
                rule: LiteralRule::Uri,
            }),
            Box::new(Replace(Replacement::InvalidUri)),
        ),
        "InvalidDate" => (
            Box::new(LiteralLocator {
                id: "InvalidDate",
                rule: LiteralRule::DatePattern,
            }),
            Box::new(Replace(Replacement::SwapDayMonth)),
        ),
        "LengthyBackEndService" => (
            Box::new(FirstStatementLocator {
                id: "LengthyBackEndService",
                names: &["doInBackground", "onStartCommand"],
                parameter_type: None,
            }),
            Box::new(InsertDelay(Delay::Sleep(config.back_end_sleep_ms))),
        ),
        "MissingPermissionManifest" => (
            Box::new(XmlLocator {
                id: "MissingPermissionManifest",
                pattern: XmlPattern::element("uses-permission"),
                reject_values: &[],
            }),
            Box::new(Delete),
        ),
        "SDKVersionUnderflow" => (
            Box::new(XmlLocator {
                id: "SDKVersionUnderflow",
                pattern: XmlPattern::attribute(NameMatch::Suffix(":minSdkVersion".into()), None, &[]),
                reject_values: &["1"],
            }),
            Box::new(Replace(Replacement::Fixed("1"))),
        ),
        "InvalidLabel" => (
            Box::new(XmlLocator {
                id: "InvalidLabel",
                pattern: XmlPattern::attribute(
                    NameMatch::Exact("android:label".into()),
                    None,
                    &["application", "activity"],
                ),
                reject_values: &[],
            }),
            Box::new(Replace(Replacement::RandomValue(config.random_key_len))),
        ),
        other => unreachable!("catalog entry `{other}` has no factory arm"),
    };
    Ok(Operator::new(descriptor, locator, transformation))
}
